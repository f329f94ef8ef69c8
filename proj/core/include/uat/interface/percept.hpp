#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uat/interface/codec.hpp"
#include "uat/interface/config.hpp"
#include "uat/taskgen/task.hpp"

namespace uat::interface {

/// One channel's content at one tick. An empty payload is the null percept.
struct Percept {
  std::uint64_t tick = 0;
  int channel = 0;
  std::string payload;

  bool null() const { return payload.empty(); }
  bool operator==(const Percept&) const = default;
};

/// All channels at one tick, indexed by channel.
using Frame = std::vector<Percept>;

/// Payload shown on the task channel after the exposition window closes.
inline constexpr std::string_view kMask = "?";
/// Payload of a free-choice prompt: any answer is acceptable.
inline constexpr std::string_view kFreeChoice = "*";

/// Payload for candidate reward signal k, e.g. "!1".
std::string signal_payload(int k);
/// k for a signal payload, nullopt otherwise.
std::optional<int> parse_signal(std::string_view payload);

Frame null_frame(std::uint64_t tick, int channels);

class UnknownChannel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The percepts of one episode: the rendered prefix on the configured channel
/// for exposition_ticks, then the mask for working_ticks. Other channels stay
/// null throughout. The answer is never part of any percept.
class PerceptStream {
 public:
  PerceptStream(const taskgen::Task& task, const Configuration& cfg, int channels,
                std::uint64_t start_tick);

  std::uint64_t start_tick() const { return start_; }
  std::uint64_t duration() const { return cfg_.time.episode_ticks(); }
  std::uint64_t working_start() const { return start_ + cfg_.time.exposition_ticks; }
  std::uint64_t end_tick() const { return start_ + duration(); }
  bool in_working_window(std::uint64_t tick) const {
    return tick >= working_start() && tick < end_tick();
  }
  const std::string& rendered() const { return rendered_; }

  /// Frame at an absolute tick inside the episode.
  Frame frame(std::uint64_t tick) const;

  bool done() const { return next_ >= end_tick(); }
  Frame next() { return frame(next_++); }

 private:
  Configuration cfg_;
  int channels_;
  std::uint64_t start_;
  std::uint64_t next_;
  std::string rendered_;
};

/// Convenience: throws UnknownCodec / UnknownChannel for bad configurations.
PerceptStream present(const taskgen::Task& task, const Configuration& cfg, int channels,
                      std::uint64_t start_tick = 0);

}  // namespace uat::interface
