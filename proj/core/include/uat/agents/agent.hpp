#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uat/interface/config.hpp"
#include "uat/interface/percept.hpp"
#include "uat/refmachine/kt.hpp"

namespace uat::agents {

using interface::Frame;
using refmachine::Symbol;
using refmachine::SymbolSequence;

struct Action {
  std::optional<Symbol> answer;

  static Action none() { return {}; }
  static Action say(Symbol s) { return Action{s}; }
};

/// The evaluee pi. Agents see percept frames and a scalar reward, nothing else;
/// no constructor here accepts a Task.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  /// One tick: every channel's percept plus the reward earned since the last call.
  virtual Action act(const Frame& frame, double reward) = 0;
  /// Back to the exact initial state, including the random stream.
  virtual void reset() = 0;
};

/// Best continuation of a prefix as found by the Kt search.
struct Prediction {
  Symbol symbol = 0;
  double kt = 0.0;
  double margin = 0.0;
};

/// Memoizes continuation searches across agents and threads. Concurrent
/// requests for the same prefix share one search.
class PredictionCache {
 public:
  explicit PredictionCache(refmachine::SearchBudget budget = {12, 1u << 12}, double margin_cap = 1.0)
      : budget_(budget), margin_cap_(margin_cap) {}

  std::optional<Prediction> predict(const SymbolSequence& prefix, int alphabet);
  const refmachine::SearchBudget& budget() const { return budget_; }
  std::size_t size() const;

  /// Process-wide cache with the default budget.
  static std::shared_ptr<PredictionCache> shared();

 private:
  using Key = std::pair<int, std::vector<Symbol>>;
  refmachine::SearchBudget budget_;
  double margin_cap_;
  mutable std::mutex mu_;
  std::map<Key, std::shared_future<std::optional<Prediction>>> entries_;
};

/// Answers uniformly at random on every tick with any non-null percept.
class RandomAgent final : public Agent {
 public:
  RandomAgent(int alphabet, std::uint64_t seed);
  std::string name() const override { return "random"; }
  Action act(const Frame& frame, double reward) override;
  void reset() override;

 private:
  int alphabet_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Never acts.
class SilentAgent final : public Agent {
 public:
  std::string name() const override { return "silent"; }
  Action act(const Frame&, double) override { return {}; }
  void reset() override {}
};

/// Reads a series in its codec on any channel and, once the series is masked,
/// answers the cheapest continuation under the Kt search. Holds no memory
/// across episodes beyond the shared prediction cache.
class EnumerativeInductor : public Agent {
 public:
  EnumerativeInductor(std::string codec, int alphabet,
                      std::shared_ptr<PredictionCache> cache = PredictionCache::shared());
  std::string name() const override { return "inductor"; }
  Action act(const Frame& frame, double reward) override;
  void reset() override;

 protected:
  /// Called with the prediction when the mask appears; returns the answer.
  virtual Action decide(const std::optional<Prediction>& p) {
    return p ? Action::say(p->symbol) : Action::none();
  }

  int alphabet_;

 private:
  std::unique_ptr<interface::Codec> codec_;
  std::shared_ptr<PredictionCache> cache_;
  std::optional<SymbolSequence> seen_;
  int seen_channel_ = -1;
};

/// Solves a task iff its difficulty (the Kt of the best continuation) is at
/// most d*; otherwise guesses uniformly.
class ThresholdAgent final : public EnumerativeInductor {
 public:
  ThresholdAgent(double d_star, std::string codec, int alphabet, std::uint64_t seed,
                 std::shared_ptr<PredictionCache> cache = PredictionCache::shared());
  std::string name() const override { return "threshold"; }
  void reset() override;
  double d_star() const { return d_star_; }

 protected:
  Action decide(const std::optional<Prediction>& p) override;

 private:
  double d_star_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Planted ground truth for discovery and controller tests.
///
/// Listens only to `channel` and reads only `codec`. It answers correctly iff
/// the series stayed visible for at least `min_exposition` ticks and the
/// working window lasts beyond its `latency` (it answers `latency` ticks after
/// the mask appears). Otherwise it stays silent.
///
/// On a free-choice prompt it repeats its previous answer with probability
/// `repeat_prob` if it was rewarded since, and guesses uniformly otherwise.
/// "Rewarded" means receiving `reward_signal` as a percept on its channel, or
/// a positive scalar reward when no signal is configured.
class ChannelSensitiveAgent final : public Agent {
 public:
  struct Params {
    int channel = 0;
    std::string codec = "raw";
    std::uint32_t min_exposition = 1;
    std::uint32_t latency = 0;
    int alphabet = refmachine::kDefaultAlphabet;
    std::optional<int> reward_signal;
    double repeat_prob = 0.9;
  };

  ChannelSensitiveAgent(Params params, std::uint64_t seed,
                        std::shared_ptr<PredictionCache> cache = PredictionCache::shared());
  std::string name() const override { return "channel"; }
  Action act(const Frame& frame, double reward) override;
  void reset() override;

  const Params& params() const { return p_; }
  /// The analytic score function: 1 on compatible configurations, 0 elsewhere.
  bool compatible(const interface::Configuration& cfg) const;

 private:
  Params p_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::shared_ptr<PredictionCache> cache_;
  std::unique_ptr<interface::Codec> codec_;

  std::optional<SymbolSequence> shown_;
  std::uint32_t exposure_ = 0;
  std::optional<std::uint32_t> masked_for_;
  bool answered_ = false;
  std::optional<Symbol> last_answer_;
  bool rewarded_ = false;
};

/// Epsilon-greedy value table keyed by the raw series payload. The reward for
/// an answer arrives with a later act() call and updates that answer's value.
class TabularLearner final : public Agent {
 public:
  TabularLearner(int alphabet, double epsilon, double alpha, std::uint64_t seed);
  std::string name() const override { return "tabular"; }
  Action act(const Frame& frame, double reward) override;
  void reset() override;
  std::size_t table_size() const { return q_.size(); }

 private:
  int alphabet_;
  double epsilon_;
  double alpha_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::map<std::string, std::vector<double>> q_;
  std::string state_;
  bool answered_ = false;
  bool after_mask_ = false;
  std::optional<std::pair<std::string, Symbol>> pending_;
};

/// Builds an agent from "name key=value ...". Known names: random, silent,
/// inductor, threshold, channel, tabular. Throws std::invalid_argument with
/// the offending parameter.
std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed,
                                  std::shared_ptr<PredictionCache> cache = PredictionCache::shared());
std::vector<std::string> agent_names();

}  // namespace uat::agents
