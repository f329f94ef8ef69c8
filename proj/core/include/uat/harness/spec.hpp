#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uat/controller/history.hpp"
#include "uat/interface/config.hpp"
#include "uat/taskgen/task_class.hpp"

namespace uat::harness {

struct Diagnostic {
  std::string field;
  std::string message;
};

/// Every problem found in a spec, not just the first.
class SpecInvalid : public std::invalid_argument {
 public:
  explicit SpecInvalid(std::vector<Diagnostic> diagnostics);
  SpecInvalid(const std::string& field, const std::string& message)
      : SpecInvalid(std::vector<Diagnostic>{{field, message}}) {}
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct DiscoverySettings {
  int repeats = 6;
  int blanks = 12;
  double threshold = 0.5;
  interface::TimeConfig time{8, 8};
  std::vector<int> signals{1, 2};
  int windows = 200;
};

/// Levels of universality:
///   1  configuration given
///   2  configuration searched
///   3  channel discovered, then the rest searched
///   4  reward signal inferred, channel discovered, rest searched
struct ExperimentSpec {
  std::string name = "experiment";
  /// Either a bank file or generation parameters.
  std::optional<std::string> bank_path;
  std::optional<taskgen::BankOptions> bank_generation;
  int channels = interface::kDefaultChannels;
  std::vector<interface::Configuration> configurations;
  /// Agent specs as accepted by agents::make_agent, or "human" for the service.
  std::vector<std::string> agents;
  int level = 2;
  /// Level 1 only: id of the given configuration.
  int configuration = 0;
  std::uint64_t budget = 1000;
  std::vector<std::uint64_t> seeds{1};
  controller::EstimateOptions estimate;
  bool reset_per_episode = false;
  DiscoverySettings discovery;
  /// Service only: milliseconds per tick.
  std::uint32_t tick_ms = 500;
  /// Search budget of the agents' Kt predictions.
  refmachine::SearchBudget agent_budget{12, 1u << 12};

  interface::ConfigurationSpace space() const {
    return interface::ConfigurationSpace(configurations, channels);
  }
};

/// Parses the JSON text of a spec. Relative bank paths resolve against base_dir.
ExperimentSpec parse_spec(const std::string& json_text, const std::string& base_dir = "");
ExperimentSpec load_spec(const std::string& path);
/// Canonical JSON; parse_spec(to_json(s)) == s field for field.
std::string to_json(const ExperimentSpec& spec);

/// The bank named by the spec, loaded or generated.
taskgen::Bank resolve_bank(const ExperimentSpec& spec);

}  // namespace uat::harness
