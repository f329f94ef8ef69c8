#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uat/taskgen/task.hpp"

namespace uat::taskgen {

/// A task distribution M: tasks, their probabilities, and difficulty strata.
///
/// Stratum i holds the tasks whose difficulty lies in [edges[i], edges[i+1]);
/// the last band is closed above so every task has a stratum.
class TaskClass {
 public:
  TaskClass() = default;
  /// Uniform weights when `weights` is empty; otherwise they are normalized.
  TaskClass(std::vector<Task> tasks, std::vector<double> band_edges,
            std::vector<double> weights = {});

  const std::vector<Task>& tasks() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }
  int alphabet() const;

  const Task& task(std::size_t i) const { return tasks_.at(i); }
  /// Index of the task with this id; throws std::out_of_range.
  std::size_t index_of(const std::string& id) const;
  bool contains(const std::string& id) const { return by_id_.count(id) != 0; }

  double weight(std::size_t i) const { return weights_.at(i); }
  double weight(const std::string& id) const { return weights_[index_of(id)]; }
  const std::vector<double>& weights() const { return weights_; }
  /// Weights as given to the constructor, before normalization.
  const std::vector<double>& raw_weights() const { return raw_weights_; }

  const std::vector<double>& band_edges() const { return edges_; }
  int stratum_count() const { return static_cast<int>(strata_.size()); }
  int stratum_of(std::size_t i) const { return stratum_of_.at(i); }
  int stratum_of(const std::string& id) const { return stratum_of_[index_of(id)]; }
  /// Task indices in stratum s, in bank order.
  const std::vector<std::size_t>& stratum(int s) const { return strata_.at(static_cast<std::size_t>(s)); }
  DifficultyBand band(int s) const;

 private:
  std::vector<Task> tasks_;
  std::vector<double> edges_;
  std::vector<double> weights_;
  std::vector<double> raw_weights_;
  std::vector<int> stratum_of_;
  std::vector<std::vector<std::size_t>> strata_;
  std::map<std::string, std::size_t> by_id_;
};

/// R for one episode.
struct EpisodeResult {
  std::string task_id;
  double score = 0.0;
  /// Ticks from the start of the working window to the answer; empty on timeout.
  std::optional<std::uint64_t> latency;
  int config_id = 0;

  bool operator==(const EpisodeResult&) const = default;
};

/// Binary scoring: 1 iff the response equals the answer. A missing response
/// (timeout) scores 0.
EpisodeResult score_response(const Task& task, std::optional<Symbol> response, int config_id,
                             std::optional<std::uint64_t> latency = std::nullopt);

enum class AggregateMode { ProbabilityWeighted, Stratified };

std::string to_string(AggregateMode mode);
AggregateMode aggregate_mode_from_string(const std::string& text);

class EmptyResults : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Upsilon over a set of episode results.
///
/// ProbabilityWeighted: repeated episodes of one task are averaged, then
/// sum(score * p) / sum(p) over the evaluated tasks. When every task is
/// evaluated this is exactly sum(score * p).
/// Stratified: mean score per stratum, averaged uniformly over the strata that
/// have results.
double aggregate(const std::vector<EpisodeResult>& results, const TaskClass& cls,
                 AggregateMode mode);

/// Task-bank file: a header line, then one tab-separated record per task:
///   id  program  prefix  answer  difficulty  exact  discriminative
/// The header carries the band edges and the search budget.
struct Bank {
  TaskClass tasks;
  SearchBudget budget;
};

void write_bank(std::ostream& out, const Bank& bank);
Bank read_bank(std::istream& in);
void save_bank(const std::string& path, const Bank& bank);
Bank load_bank(const std::string& path);

struct BankOptions {
  std::vector<double> band_edges{7.0, 9.5, 10.0, 11.0, 12.0, 13.5, 15.5};
  int tasks_per_stratum = 8;
  GenerationOptions generation;
  std::uint64_t seed = 1;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Generates tasks_per_stratum distinct tasks for each band. Deterministic in
/// the seed regardless of the thread count.
Bank generate_bank(const BankOptions& options);

}  // namespace uat::taskgen
