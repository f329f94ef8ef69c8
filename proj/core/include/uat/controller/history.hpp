#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uat/taskgen/task_class.hpp"

namespace uat::controller {

using taskgen::AggregateMode;
using taskgen::EpisodeResult;

/// One evaluated episode. `tau` is the episode's tick budget (exposition plus
/// working); `start_tick` is where it began on the session clock. Weight and
/// stratum are copied from the task class so the log is self-contained.
struct HistoryEntry {
  std::uint64_t start_tick = 0;
  std::uint64_t tau = 0;
  std::string task_id;
  int config_id = 0;
  int stratum = 0;
  double weight = 0.0;
  EpisodeResult result;

  bool operator==(const HistoryEntry& o) const;
};

using History = std::vector<HistoryEntry>;

struct EstimateOptions {
  AggregateMode mode = AggregateMode::ProbabilityWeighted;
  /// Episodes a configuration needs before it may be declared best.
  std::size_t episode_floor = 5;
};

struct ConfigScore {
  double aggregate = 0.0;
  std::size_t episodes = 0;
};

/// The max-over-configurations estimate U(pi, M, Theta) at some point of a test.
struct UEstimate {
  std::map<int, ConfigScore> per_config;
  /// Highest aggregate among configurations at or above the episode floor,
  /// ties to the lowest id. Empty when none qualifies.
  std::optional<int> best_config;
  double value = 0.0;
  std::size_t episodes = 0;
  /// Highest stratum whose mean score at best_config is at least 0.5.
  std::optional<int> reach;

  /// False when no episode ran (for example a budget below one episode).
  bool evaluated() const { return episodes > 0; }
  bool operator==(const UEstimate&) const;
};

bool operator==(const ConfigScore& a, const ConfigScore& b);

/// Pure fold over H. Replaying the same history yields a bit-identical result.
UEstimate u_estimate(const History& h, const EstimateOptions& options = {});

/// Per-stratum mean score at one configuration; strata without episodes are absent.
std::map<int, double> stratum_means(const History& h, int config_id);

}  // namespace uat::controller
