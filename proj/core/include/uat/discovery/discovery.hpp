#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uat/agents/agent.hpp"
#include "uat/interface/config.hpp"

namespace uat::discovery {

/// One probe tick where something was shown or something was done.
struct ProbeRecord {
  std::uint64_t tick = 0;
  /// Channel carrying the stimulus; -1 for blanks and broadcasts.
  int channel = -1;
  std::string stimulus;
  std::optional<refmachine::Symbol> action;
  std::optional<double> reward;

  bool operator==(const ProbeRecord&) const = default;
};

struct DiscoveryReport {
  /// Responsiveness per channel, normalized to sum 1 (uniform when all are 0).
  std::map<int, double> posterior;
  /// Raw scores: correct-response rate under stimulus minus blank response rate.
  std::map<int, double> scores;
  /// Codec under which each channel scored best.
  std::map<int, std::string> best_codec;
  std::optional<int> channel;

  /// Plug-in mutual information (bits) per candidate reward signal.
  std::map<int, double> signal_mi;
  std::optional<int> reward_signal;

  /// Level below which a score (or information estimate) counts as noise.
  double threshold = 0.0;
  /// (top - second) / top over the relevant scores; 0 when inconclusive.
  double confidence = 0.0;
  bool conclusive = false;
  std::vector<ProbeRecord> probes;
};

struct ChannelProbeOptions {
  int channels = interface::kDefaultChannels;
  int alphabet = refmachine::kDefaultAlphabet;
  /// Codecs tried on every channel; empty means every registered codec.
  std::vector<std::string> codecs;
  /// Slow on purpose, so subjects that need time can still answer.
  interface::TimeConfig time{8, 8};
  std::size_t prefix_length = 4;
  /// Stimulus trials per (channel, codec) pair.
  int repeats = 6;
  int blanks = 12;
  double threshold = 0.5;
  /// Level 4: reward is this signal broadcast on every channel rather than a scalar.
  std::optional<int> reward_signal;
  std::uint64_t seed = 0;
};

/// Presents constant series ("c c c c", answer c) on every channel under
/// every codec, interleaved with blank trials, rewarding correct answers.
/// Each trial ends with one feedback tick. Never claims a channel whose score
/// is not above the threshold (which is positive).
DiscoveryReport discover_channel(agents::Agent& agent, const ChannelProbeOptions& options);

inline constexpr std::size_t kRewardWindow = 8;
inline constexpr std::size_t kMaxCandidates = 3;

struct RewardProbeOptions {
  int channels = interface::kDefaultChannels;
  std::vector<int> candidates{1, 2};
  /// Windows of kRewardWindow ticks each.
  int windows = 200;
  /// Chi-square(1) quantile for the noise floor; 10.83 is the 0.999 level.
  double chi2_quantile = 10.83;
  std::uint64_t seed = 0;
};

/// Each window broadcasts a free-choice prompt for 4 ticks, then gives
/// candidate j at tick 4 + j with probability 1/2, independently. For each
/// candidate the plug-in mutual information between "given in window i" and
/// "window i+1 repeats the answer of window i" is estimated. Estimates below
/// chi2_quantile / (2 N ln 2) bits are treated as noise.
DiscoveryReport infer_reward(agents::Agent& agent, const RewardProbeOptions& options);

/// counts[x][y] for binary X and Y.
using Table2x2 = std::array<std::array<std::size_t, 2>, 2>;

/// Plug-in mutual information in bits.
double mutual_information(const Table2x2& counts);

/// Noise floor for a plug-in estimate from n pairs.
double mi_noise_floor(std::size_t n, double chi2_quantile);

}  // namespace uat::discovery
