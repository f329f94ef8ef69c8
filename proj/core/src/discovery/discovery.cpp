#include "uat/discovery/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "uat/interface/codec.hpp"
#include "uat/interface/percept.hpp"

namespace uat::discovery {

using interface::Frame;
using refmachine::Symbol;
using refmachine::SymbolSequence;

namespace {

Frame broadcast(std::uint64_t tick, int channels, const std::string& payload) {
  Frame f = interface::null_frame(tick, channels);
  for (auto& p : f) p.payload = payload;
  return f;
}

// (top - second) / top over the positive entries; 0 when nothing is positive.
double separation(const std::map<int, double>& values) {
  double top = 0.0;
  double second = 0.0;
  for (const auto& [k, v] : values) {
    if (v > top) {
      second = top;
      top = v;
    } else if (v > second) {
      second = v;
    }
  }
  return top > 0.0 ? (top - second) / top : 0.0;
}

struct Trial {
  int channel = -1;
  std::size_t codec = 0;
};

}  // namespace

DiscoveryReport discover_channel(agents::Agent& agent, const ChannelProbeOptions& o) {
  if (o.channels < 1) throw std::invalid_argument("discover_channel: no channels");
  if (o.repeats < 1 || o.blanks < 1) throw std::invalid_argument("discover_channel: need stimulus and blank trials");
  interface::validate(o.time);
  const auto codec_names = o.codecs.empty() ? interface::codec_ids() : o.codecs;
  std::vector<std::unique_ptr<interface::Codec>> codecs;
  for (const auto& id : codec_names) codecs.push_back(interface::make_codec(id, o.alphabet));

  std::vector<Trial> trials;
  for (int c = 0; c < o.channels; ++c) {
    for (std::size_t k = 0; k < codecs.size(); ++k) {
      for (int r = 0; r < o.repeats; ++r) trials.push_back({c, k});
    }
  }
  for (int b = 0; b < o.blanks; ++b) trials.push_back({-1, 0});
  std::mt19937_64 rng(o.seed);
  std::shuffle(trials.begin(), trials.end(), rng);
  std::uniform_int_distribution<int> pick(0, o.alphabet - 1);

  agent.reset();
  DiscoveryReport rep;
  rep.threshold = o.threshold;
  // correct[c][k], trials[c][k]
  std::vector<std::vector<int>> correct(static_cast<std::size_t>(o.channels), std::vector<int>(codecs.size(), 0));
  std::vector<std::vector<int>> shown(correct);
  int blank_responses = 0;
  std::uint64_t tick = 0;
  double reward = 0.0;

  for (const auto& t : trials) {
    const auto s = static_cast<Symbol>(pick(rng));
    const std::string rendered =
        t.channel < 0 ? std::string()
                      : codecs[t.codec]->render(SymbolSequence(std::vector<Symbol>(o.prefix_length, s)));
    std::optional<Symbol> first;
    bool answered_in_window = false;
    bool hit = false;
    const std::uint64_t working = tick + o.time.exposition_ticks;
    const std::uint64_t end = tick + o.time.episode_ticks();
    for (; tick < end; ++tick) {
      Frame f = interface::null_frame(tick, o.channels);
      if (t.channel >= 0) {
        f[static_cast<std::size_t>(t.channel)].payload = tick < working ? rendered : std::string(interface::kMask);
      }
      const auto a = agent.act(f, reward);
      reward = 0.0;
      if (!a.answer) continue;
      if (!first) first = a.answer;
      if (tick >= working && !answered_in_window) {
        answered_in_window = true;
        hit = t.channel >= 0 && *a.answer == s;
      }
    }
    ProbeRecord rec{working, t.channel, t.channel < 0 ? "" : codec_names[t.codec] + ":" + rendered,
                    first, std::nullopt};
    if (t.channel < 0) {
      if (first) ++blank_responses;
    } else {
      auto& ct = correct[static_cast<std::size_t>(t.channel)][t.codec];
      ++shown[static_cast<std::size_t>(t.channel)][t.codec];
      if (hit) ++ct;
    }
    // Feedback tick.
    Frame feedback = interface::null_frame(tick, o.channels);
    if (hit) {
      rec.reward = 1.0;
      if (o.reward_signal) {
        feedback = broadcast(tick, o.channels, interface::signal_payload(*o.reward_signal));
        agent.act(feedback, 0.0);
      } else {
        agent.act(feedback, 1.0);
      }
    } else {
      agent.act(feedback, 0.0);
    }
    ++tick;
    rep.probes.push_back(std::move(rec));
  }

  const double baseline = static_cast<double>(blank_responses) / o.blanks;
  for (int c = 0; c < o.channels; ++c) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < codecs.size(); ++k) {
      const auto i = static_cast<std::size_t>(c);
      const double rate = static_cast<double>(correct[i][k]) / shown[i][k];
      if (rate > best) {
        best = rate;
        best_k = k;
      }
    }
    rep.scores[c] = best - baseline;
    rep.best_codec[c] = codec_names[best_k];
  }
  double total = 0.0;
  for (const auto& [c, v] : rep.scores) total += std::max(v, 0.0);
  for (const auto& [c, v] : rep.scores) {
    rep.posterior[c] = total > 0.0 ? std::max(v, 0.0) / total : 1.0 / o.channels;
  }
  auto top = std::max_element(rep.scores.begin(), rep.scores.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; });
  if (top->second > o.threshold) {
    rep.channel = top->first;
    rep.conclusive = true;
    rep.confidence = separation(rep.scores);
  }
  return rep;
}

double mutual_information(const Table2x2& n) {
  const double total = static_cast<double>(n[0][0] + n[0][1] + n[1][0] + n[1][1]);
  if (total == 0.0) return 0.0;
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    const double px = static_cast<double>(n[x][0] + n[x][1]) / total;
    for (int y = 0; y < 2; ++y) {
      if (n[x][y] == 0) continue;
      const double pxy = static_cast<double>(n[x][y]) / total;
      const double py = static_cast<double>(n[0][y] + n[1][y]) / total;
      mi += pxy * std::log2(pxy / (px * py));
    }
  }
  return std::max(mi, 0.0);
}

double mi_noise_floor(std::size_t n, double chi2_quantile) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  return chi2_quantile / (2.0 * static_cast<double>(n) * std::log(2.0));
}

DiscoveryReport infer_reward(agents::Agent& agent, const RewardProbeOptions& o) {
  if (o.candidates.size() < 2) throw std::invalid_argument("infer_reward: need at least two candidate signals");
  if (o.candidates.size() > kMaxCandidates) throw std::invalid_argument("infer_reward: at most 3 candidate signals");
  if (o.windows < 2) throw std::invalid_argument("infer_reward: need at least two windows");
  if (o.channels < 1) throw std::invalid_argument("infer_reward: no channels");

  std::mt19937_64 rng(o.seed);
  std::bernoulli_distribution coin(0.5);
  agent.reset();
  DiscoveryReport rep;
  const auto m = o.candidates.size();
  std::vector<std::vector<bool>> given(static_cast<std::size_t>(o.windows), std::vector<bool>(m, false));
  std::vector<std::optional<Symbol>> answer(static_cast<std::size_t>(o.windows));
  const std::string prompt(interface::kFreeChoice);
  std::uint64_t tick = 0;

  for (std::size_t w = 0; w < static_cast<std::size_t>(o.windows); ++w) {
    for (std::size_t j = 0; j < m; ++j) given[w][j] = coin(rng);
    for (std::size_t i = 0; i < kRewardWindow; ++i, ++tick) {
      Frame f;
      std::string stimulus;
      if (i < 4) {
        stimulus = prompt;
      } else if (i - 4 < m && given[w][i - 4]) {
        stimulus = interface::signal_payload(o.candidates[i - 4]);
      }
      f = stimulus.empty() ? interface::null_frame(tick, o.channels) : broadcast(tick, o.channels, stimulus);
      const auto a = agent.act(f, 0.0);
      if (i < 4 && a.answer && !answer[w]) answer[w] = a.answer;
      if (!stimulus.empty() || a.answer) rep.probes.push_back({tick, -1, stimulus, a.answer, std::nullopt});
    }
  }

  const std::size_t pairs = static_cast<std::size_t>(o.windows) - 1;
  rep.threshold = mi_noise_floor(pairs, o.chi2_quantile);
  for (std::size_t j = 0; j < m; ++j) {
    Table2x2 t{};
    for (std::size_t w = 0; w + 1 < static_cast<std::size_t>(o.windows); ++w) {
      const bool repeat = answer[w] && answer[w + 1] && *answer[w] == *answer[w + 1];
      ++t[given[w][j] ? 1 : 0][repeat ? 1 : 0];
    }
    rep.signal_mi[o.candidates[j]] = mutual_information(t);
  }
  auto top = std::max_element(rep.signal_mi.begin(), rep.signal_mi.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; });
  if (top->second > rep.threshold) {
    rep.reward_signal = top->first;
    rep.conclusive = true;
    rep.confidence = separation(rep.signal_mi);
  }
  return rep;
}

}  // namespace uat::discovery
