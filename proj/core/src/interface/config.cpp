#include "uat/interface/config.hpp"

#include <algorithm>
#include <map>

#include "uat/interface/codec.hpp"

namespace uat::interface {

TimeConfig TimeConfig::slowed(int notches) const {
  TimeConfig t = *this;
  t.exposition_ticks <<= notches;
  t.working_ticks <<= notches;
  return t;
}

std::string Configuration::label() const {
  return "e" + std::to_string(time.exposition_ticks) + "w" + std::to_string(time.working_ticks) +
         "/" + resolution.codec + (resolution.alphabet == refmachine::kDefaultAlphabet
                                       ? ""
                                       : std::to_string(resolution.alphabet)) +
         "/c" + std::to_string(resolution.channel);
}

void validate(const TimeConfig& t) {
  if (t.exposition_ticks < 1) throw InvalidConfiguration("exposition_ticks must be >= 1");
  if (t.working_ticks < 1) throw InvalidConfiguration("working_ticks must be >= 1");
}

void validate(const Configuration& c, int channels) {
  validate(c.time);
  if (c.resolution.alphabet < 2 || c.resolution.alphabet > refmachine::kMaxAlphabet) {
    throw InvalidConfiguration("alphabet size out of range: " + std::to_string(c.resolution.alphabet));
  }
  if (!codec_registered(c.resolution.codec)) throw UnknownCodec("unknown codec: " + c.resolution.codec);
  if (c.resolution.channel < 0 || c.resolution.channel >= channels) {
    throw InvalidConfiguration("channel " + std::to_string(c.resolution.channel) + " outside 0.." +
                               std::to_string(channels - 1));
  }
}

ConfigurationSpace::ConfigurationSpace(std::vector<Configuration> configs, int channels)
    : configs_(std::move(configs)), channels_(channels) {
  if (channels_ < 1) throw InvalidConfiguration("channel count must be positive");
  std::map<std::pair<std::uint64_t, std::uint32_t>, int> rank;
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    configs_[i].id = static_cast<int>(i);
    validate(configs_[i], channels_);
    const auto& t = configs_[i].time;
    rank.emplace(std::make_pair(t.episode_ticks(), t.exposition_ticks), 0);
  }
  int next = 0;
  for (auto& [key, r] : rank) r = next++;
  levels_.resize(rank.size());
  for (const auto& c : configs_) {
    const int l = rank.at({c.time.episode_ticks(), c.time.exposition_ticks});
    level_of_.push_back(l);
    levels_[static_cast<std::size_t>(l)].push_back(c.id);
  }
}

ConfigurationSpace ConfigurationSpace::grid(const std::vector<TimeConfig>& times,
                                            const std::vector<ResolutionConfig>& resolutions,
                                            int channels) {
  std::vector<Configuration> out;
  for (const auto& t : times) {
    for (const auto& r : resolutions) out.push_back(Configuration{0, t, r});
  }
  return ConfigurationSpace(std::move(out), channels);
}

ConfigurationSpace ConfigurationSpace::restrict_to_channel(int channel) const {
  std::vector<Configuration> out;
  for (const auto& c : configs_) {
    if (c.resolution.channel == channel) out.push_back(c);
  }
  return ConfigurationSpace(std::move(out), channels_);
}

int ConfigurationSpace::find(const Configuration& c) const {
  for (const auto& x : configs_) {
    if (x.time == c.time && x.resolution == c.resolution) return x.id;
  }
  return -1;
}

}  // namespace uat::interface
