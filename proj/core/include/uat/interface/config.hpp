#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "uat/refmachine/program.hpp"

namespace uat::interface {

inline constexpr int kDefaultChannels = 4;

/// How long the series stays visible and how long the subject has to answer.
struct TimeConfig {
  std::uint32_t exposition_ticks = 1;
  std::uint32_t working_ticks = 1;

  std::uint64_t episode_ticks() const { return std::uint64_t{exposition_ticks} + working_ticks; }
  /// Both windows scaled by 2^notches.
  TimeConfig slowed(int notches) const;

  auto operator<=>(const TimeConfig&) const = default;
};

struct ResolutionConfig {
  int alphabet = refmachine::kDefaultAlphabet;
  std::string codec = "raw";
  int channel = 0;

  auto operator<=>(const ResolutionConfig&) const = default;
};

/// theta: a time configuration paired with a resolution configuration.
struct Configuration {
  int id = 0;
  TimeConfig time;
  ResolutionConfig resolution;

  /// e.g. "e2w4/raw/c1"
  std::string label() const;
};

class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite configuration set Theta. Ids are positions in the list. Time
/// levels rank the distinct time configurations from fastest to slowest.
class ConfigurationSpace {
 public:
  ConfigurationSpace() = default;
  /// Ids in `configs` are reassigned to their positions.
  explicit ConfigurationSpace(std::vector<Configuration> configs, int channels = kDefaultChannels);

  /// Every time configuration crossed with every resolution, time-major.
  static ConfigurationSpace grid(const std::vector<TimeConfig>& times,
                                 const std::vector<ResolutionConfig>& resolutions,
                                 int channels = kDefaultChannels);

  const std::vector<Configuration>& configs() const { return configs_; }
  const Configuration& at(int id) const { return configs_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return configs_.size(); }
  bool empty() const { return configs_.empty(); }
  int channels() const { return channels_; }

  int time_level_count() const { return static_cast<int>(levels_.size()); }
  int time_level(int id) const { return level_of_.at(static_cast<std::size_t>(id)); }
  /// Configuration ids at one time level, in id order.
  const std::vector<int>& level(int l) const { return levels_.at(static_cast<std::size_t>(l)); }

  /// The subset with the given channel, ids renumbered.
  ConfigurationSpace restrict_to_channel(int channel) const;
  /// Id of the first configuration equal to `c` ignoring ids, or -1.
  int find(const Configuration& c) const;

 private:
  std::vector<Configuration> configs_;
  int channels_ = kDefaultChannels;
  std::vector<int> level_of_;
  std::vector<std::vector<int>> levels_;
};

void validate(const TimeConfig& t);
void validate(const Configuration& c, int channels);

}  // namespace uat::interface
