#include "uat/agents/agent.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace uat::agents {

using interface::kFreeChoice;
using interface::kMask;

namespace {

bool is_content(const std::string& payload) {
  return !payload.empty() && payload != kMask && payload != kFreeChoice &&
         !interface::parse_signal(payload);
}

std::optional<SymbolSequence> try_parse(const interface::Codec& codec, const std::string& payload) {
  if (!is_content(payload)) return std::nullopt;
  try {
    auto x = codec.parse(payload);
    if (x.empty()) return std::nullopt;
    return x;
  } catch (const refmachine::ParseError&) {
    return std::nullopt;
  }
}

Symbol uniform_symbol(std::mt19937_64& rng, int alphabet) {
  return static_cast<Symbol>(std::uniform_int_distribution<int>(0, alphabet - 1)(rng));
}

}  // namespace

std::optional<Prediction> PredictionCache::predict(const SymbolSequence& prefix, int alphabet) {
  if (prefix.empty()) return std::nullopt;
  Key key{alphabet, prefix.symbols()};
  std::shared_future<std::optional<Prediction>> fut;
  std::promise<std::optional<Prediction>> mine;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      fut = mine.get_future().share();
      entries_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      const auto profile = refmachine::continuation_profile(prefix, budget_, alphabet, margin_cap_);
      std::optional<Prediction> out;
      if (profile.best) {
        out = Prediction{profile.best->symbol, profile.best->result.value.value, profile.margin()};
      }
      mine.set_value(out);
    } catch (...) {
      mine.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

std::size_t PredictionCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::shared_ptr<PredictionCache> PredictionCache::shared() {
  static auto cache = std::make_shared<PredictionCache>();
  return cache;
}

RandomAgent::RandomAgent(int alphabet, std::uint64_t seed)
    : alphabet_(alphabet), seed_(seed), rng_(seed) {}

Action RandomAgent::act(const Frame& frame, double) {
  const bool any = std::any_of(frame.begin(), frame.end(), [](const auto& p) { return !p.null(); });
  if (!any) return {};
  return Action::say(uniform_symbol(rng_, alphabet_));
}

void RandomAgent::reset() { rng_.seed(seed_); }

EnumerativeInductor::EnumerativeInductor(std::string codec, int alphabet,
                                         std::shared_ptr<PredictionCache> cache)
    : alphabet_(alphabet), codec_(interface::make_codec(codec, alphabet)), cache_(std::move(cache)) {}

Action EnumerativeInductor::act(const Frame& frame, double) {
  for (const auto& p : frame) {
    if (auto x = try_parse(*codec_, p.payload)) {
      seen_ = std::move(x);
      seen_channel_ = p.channel;
    }
  }
  if (!seen_ || seen_channel_ < 0 || static_cast<std::size_t>(seen_channel_) >= frame.size()) return {};
  if (frame[static_cast<std::size_t>(seen_channel_)].payload != kMask) return {};
  const auto prediction = cache_->predict(*seen_, alphabet_);
  seen_.reset();
  seen_channel_ = -1;
  return decide(prediction);
}

void EnumerativeInductor::reset() {
  seen_.reset();
  seen_channel_ = -1;
}

ThresholdAgent::ThresholdAgent(double d_star, std::string codec, int alphabet, std::uint64_t seed,
                               std::shared_ptr<PredictionCache> cache)
    : EnumerativeInductor(std::move(codec), alphabet, std::move(cache)),
      d_star_(d_star),
      seed_(seed),
      rng_(seed) {}

Action ThresholdAgent::decide(const std::optional<Prediction>& p) {
  if (p && p->kt <= d_star_) return Action::say(p->symbol);
  return Action::say(uniform_symbol(rng_, alphabet_));
}

void ThresholdAgent::reset() {
  EnumerativeInductor::reset();
  rng_.seed(seed_);
}

ChannelSensitiveAgent::ChannelSensitiveAgent(Params params, std::uint64_t seed,
                                             std::shared_ptr<PredictionCache> cache)
    : p_(std::move(params)),
      seed_(seed),
      rng_(seed),
      cache_(std::move(cache)),
      codec_(interface::make_codec(p_.codec, p_.alphabet)) {}

bool ChannelSensitiveAgent::compatible(const interface::Configuration& cfg) const {
  return cfg.resolution.channel == p_.channel && cfg.resolution.codec == p_.codec &&
         cfg.resolution.alphabet == p_.alphabet && cfg.time.exposition_ticks >= p_.min_exposition &&
         cfg.time.working_ticks > p_.latency;
}

Action ChannelSensitiveAgent::act(const Frame& frame, double reward) {
  if (!p_.reward_signal && reward > 0.0) rewarded_ = true;
  if (static_cast<std::size_t>(p_.channel) >= frame.size()) return {};
  const std::string& payload = frame[static_cast<std::size_t>(p_.channel)].payload;

  if (auto k = interface::parse_signal(payload)) {
    if (p_.reward_signal && *k == *p_.reward_signal) rewarded_ = true;
    return {};
  }
  if (payload == kFreeChoice) {
    if (answered_) return {};
    answered_ = true;
    Symbol s = uniform_symbol(rng_, p_.alphabet);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (rewarded_ && last_answer_ && u < p_.repeat_prob) s = *last_answer_;
    rewarded_ = false;
    last_answer_ = s;
    return Action::say(s);
  }
  if (payload == kMask) {
    masked_for_ = masked_for_ ? *masked_for_ + 1 : 0;
    if (!shown_ || exposure_ < p_.min_exposition) return {};
    if (answered_ || *masked_for_ != p_.latency) return {};
    answered_ = true;
    const auto prediction = cache_->predict(*shown_, p_.alphabet);
    if (!prediction) return {};
    last_answer_ = prediction->symbol;
    return Action::say(prediction->symbol);
  }
  if (auto x = try_parse(*codec_, payload)) {
    // A series that reappears after a mask is a new episode.
    if (shown_ && *shown_ == *x && !masked_for_) {
      ++exposure_;
    } else {
      shown_ = std::move(x);
      exposure_ = 1;
    }
    masked_for_.reset();
    answered_ = false;
    return {};
  }
  // Null or unreadable: whatever was on screen is gone.
  shown_.reset();
  exposure_ = 0;
  masked_for_.reset();
  answered_ = false;
  return {};
}

void ChannelSensitiveAgent::reset() {
  rng_.seed(seed_);
  shown_.reset();
  exposure_ = 0;
  masked_for_.reset();
  answered_ = false;
  last_answer_.reset();
  rewarded_ = false;
}

TabularLearner::TabularLearner(int alphabet, double epsilon, double alpha, std::uint64_t seed)
    : alphabet_(alphabet), epsilon_(epsilon), alpha_(alpha), seed_(seed), rng_(seed) {}

Action TabularLearner::act(const Frame& frame, double reward) {
  if (pending_) {
    auto& q = q_[pending_->first][pending_->second];
    q += alpha_ * (reward - q);
    pending_.reset();
  }
  bool masked = false;
  for (const auto& p : frame) {
    if (is_content(p.payload)) {
      // New series, or the same one shown again after a mask: a new episode.
      if (p.payload != state_ || after_mask_) answered_ = false;
      state_ = p.payload;
      after_mask_ = false;
    } else if (p.payload == kMask) {
      masked = true;
    }
  }
  if (masked) after_mask_ = true;
  if (!masked || answered_ || state_.empty()) return {};
  answered_ = true;
  auto [it, fresh] = q_.try_emplace(state_, std::vector<double>(static_cast<std::size_t>(alphabet_), 0.0));
  const auto& q = it->second;
  Symbol s;
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < epsilon_) {
    s = uniform_symbol(rng_, alphabet_);
  } else {
    // Greedy with uniform tie-breaking among the maxima.
    const double best = *std::max_element(q.begin(), q.end());
    std::vector<Symbol> top;
    for (int i = 0; i < alphabet_; ++i) {
      if (q[static_cast<std::size_t>(i)] == best) top.push_back(static_cast<Symbol>(i));
    }
    s = top[std::uniform_int_distribution<std::size_t>(0, top.size() - 1)(rng_)];
  }
  pending_ = std::make_pair(state_, s);
  return Action::say(s);
}

void TabularLearner::reset() {
  rng_.seed(seed_);
  q_.clear();
  state_.clear();
  answered_ = false;
  after_mask_ = false;
  pending_.reset();
}

namespace {

struct SpecParams {
  std::string name;
  std::map<std::string, std::string> kv;
  std::map<std::string, bool> used;

  std::string str(const std::string& key, const std::string& fallback) {
    used[key] = true;
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }
  double real(const std::string& key, double fallback) {
    used[key] = true;
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument("agent " + name + ": " + key + " is not a number: " + s);
    }
    return v;
  }
  long integer(const std::string& key, long fallback) {
    used[key] = true;
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    long v = 0;
    const auto& s = it->second;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument("agent " + name + ": " + key + " is not an integer: " + s);
    }
    return v;
  }
  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void finish() const {
    for (const auto& [k, v] : kv) {
      if (!used.count(k)) throw std::invalid_argument("agent " + name + ": unknown parameter " + k);
    }
  }
};

SpecParams parse_spec(const std::string& spec) {
  std::istringstream in(spec);
  SpecParams p;
  if (!(in >> p.name)) throw std::invalid_argument("empty agent spec");
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("agent " + p.name + ": expected key=value, got " + tok);
    }
    p.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return p;
}

}  // namespace

std::vector<std::string> agent_names() {
  return {"random", "silent", "inductor", "threshold", "channel", "tabular"};
}

std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed,
                                  std::shared_ptr<PredictionCache> cache) {
  auto p = parse_spec(spec);
  const int alphabet = static_cast<int>(p.integer("alphabet", refmachine::kDefaultAlphabet));
  std::unique_ptr<Agent> agent;
  if (p.name == "random") {
    agent = std::make_unique<RandomAgent>(alphabet, seed);
  } else if (p.name == "silent") {
    agent = std::make_unique<SilentAgent>();
  } else if (p.name == "inductor") {
    agent = std::make_unique<EnumerativeInductor>(p.str("codec", "raw"), alphabet, cache);
  } else if (p.name == "threshold") {
    if (!p.has("d")) throw std::invalid_argument("agent threshold: missing d");
    agent = std::make_unique<ThresholdAgent>(p.real("d", 0.0), p.str("codec", "raw"), alphabet, seed,
                                             cache);
  } else if (p.name == "channel") {
    ChannelSensitiveAgent::Params cp;
    cp.channel = static_cast<int>(p.integer("channel", 0));
    cp.codec = p.str("codec", "raw");
    cp.min_exposition = static_cast<std::uint32_t>(p.integer("exposition", 1));
    cp.latency = static_cast<std::uint32_t>(p.integer("latency", 0));
    cp.alphabet = alphabet;
    if (p.has("signal")) cp.reward_signal = static_cast<int>(p.integer("signal", 0));
    cp.repeat_prob = p.real("repeat", 0.9);
    agent = std::make_unique<ChannelSensitiveAgent>(cp, seed, cache);
  } else if (p.name == "tabular") {
    agent = std::make_unique<TabularLearner>(alphabet, p.real("epsilon", 0.1), p.real("alpha", 0.5), seed);
  } else {
    throw std::invalid_argument("unknown agent: " + p.name);
  }
  p.finish();
  return agent;
}

}  // namespace uat::agents
