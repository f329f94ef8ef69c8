#include "uat/interface/percept.hpp"

#include <charconv>

namespace uat::interface {

std::string signal_payload(int k) { return "!" + std::to_string(k); }

std::optional<int> parse_signal(std::string_view payload) {
  if (payload.size() < 2 || payload[0] != '!') return std::nullopt;
  int k = 0;
  auto res = std::from_chars(payload.data() + 1, payload.data() + payload.size(), k);
  if (res.ec != std::errc() || res.ptr != payload.data() + payload.size()) return std::nullopt;
  return k;
}

Frame null_frame(std::uint64_t tick, int channels) {
  Frame f;
  f.reserve(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) f.push_back(Percept{tick, c, {}});
  return f;
}

PerceptStream::PerceptStream(const taskgen::Task& task, const Configuration& cfg, int channels,
                             std::uint64_t start_tick)
    : cfg_(cfg), channels_(channels), start_(start_tick), next_(start_tick) {
  validate(cfg.time);
  if (cfg.resolution.channel < 0 || cfg.resolution.channel >= channels) {
    throw UnknownChannel("channel " + std::to_string(cfg.resolution.channel) + " outside 0.." +
                         std::to_string(channels - 1));
  }
  rendered_ = make_codec(cfg.resolution.codec, cfg.resolution.alphabet)->render(task.prefix);
}

Frame PerceptStream::frame(std::uint64_t tick) const {
  Frame f = null_frame(tick, channels_);
  if (tick < start_ || tick >= end_tick()) return f;
  auto& p = f[static_cast<std::size_t>(cfg_.resolution.channel)];
  p.payload = tick < working_start() ? rendered_ : std::string(kMask);
  return f;
}

PerceptStream present(const taskgen::Task& task, const Configuration& cfg, int channels,
                      std::uint64_t start_tick) {
  return PerceptStream(task, cfg, channels, start_tick);
}

}  // namespace uat::interface
