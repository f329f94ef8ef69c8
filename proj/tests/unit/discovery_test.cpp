#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "uat/discovery/discovery.hpp"

using namespace uat;
using namespace uat::discovery;

namespace {

agents::ChannelSensitiveAgent planted(int channel, std::string codec = "raw", std::optional<int> signal = {}) {
  agents::ChannelSensitiveAgent::Params p;
  p.channel = channel;
  p.codec = std::move(codec);
  p.min_exposition = 2;
  p.reward_signal = signal;
  return agents::ChannelSensitiveAgent(p, 3);
}

// Repeats its last free choice after either of two signals.
class TwoSignalAgent : public agents::Agent {
 public:
  std::string name() const override { return "two-signal"; }
  agents::Action act(const agents::Frame& frame, double) override {
    const auto& payload = frame.front().payload;
    if (auto k = interface::parse_signal(payload)) {
      if (*k == 1 || *k == 2) rewarded_ = true;
      return {};
    }
    if (payload != interface::kFreeChoice) {
      answered_ = false;
      return {};
    }
    if (answered_) return {};
    answered_ = true;
    auto s = static_cast<refmachine::Symbol>(rng_() % 26);
    if (rewarded_ && last_) s = *last_;
    rewarded_ = false;
    last_ = s;
    return agents::Action::say(s);
  }
  void reset() override {
    rng_.seed(1);
    rewarded_ = answered_ = false;
    last_.reset();
  }

 private:
  std::mt19937_64 rng_{1};
  bool rewarded_ = false;
  bool answered_ = false;
  std::optional<refmachine::Symbol> last_;
};

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

double sum_posterior(const DiscoveryReport& r) {
  double s = 0.0;
  for (const auto& [c, p] : r.posterior) s += p;
  return s;
}

}  // namespace

TEST_CASE("the planted channel is identified") {
  for (int channel = 0; channel < 4; ++channel) {
    auto agent = planted(channel);
    ChannelProbeOptions opt;
    opt.seed = static_cast<std::uint64_t>(channel);
    const auto r = discover_channel(agent, opt);
    CAPTURE(channel);
    REQUIRE(r.channel);
    CHECK(*r.channel == channel);
    CHECK(r.conclusive);
    CHECK(r.posterior.at(channel) > 0.9);
    CHECK(r.best_codec.at(channel) == "raw");
    CHECK(r.confidence > 0.9);
    CHECK(sum_posterior(r) == doctest::Approx(1.0));
  }
}

TEST_CASE("the codec an agent reads is reported") {
  auto agent = planted(1, "radix");
  const auto r = discover_channel(agent, {});
  REQUIRE(r.channel);
  CHECK(*r.channel == 1);
  CHECK(r.best_codec.at(1) == "radix");
}

TEST_CASE("a silent agent is inconclusive") {
  agents::SilentAgent agent;
  const auto r = discover_channel(agent, {});
  CHECK_FALSE(r.conclusive);
  CHECK_FALSE(r.channel);
  for (const auto& [c, p] : r.posterior) CHECK(p == doctest::Approx(0.25));
  CHECK(r.confidence == 0.0);
}

TEST_CASE("a guessing agent does not clear the threshold") {
  int false_alarms = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    agents::RandomAgent agent(26, seed);
    ChannelProbeOptions opt;
    opt.seed = seed;
    const auto r = discover_channel(agent, opt);
    false_alarms += r.conclusive;
    if (!r.conclusive) CHECK_FALSE(r.channel);
  }
  CHECK(false_alarms == 0);
}

TEST_CASE("an agent that reads every channel gives no preference") {
  agents::EnumerativeInductor agent("raw", 26);
  const auto r = discover_channel(agent, {});
  for (const auto& [c, p] : r.posterior) CHECK(p == doctest::Approx(0.25).epsilon(0.1));
  CHECK(r.confidence < 0.2);
}

TEST_CASE("probing is deterministic in the seed") {
  auto a = planted(2);
  auto b = planted(2);
  ChannelProbeOptions opt;
  opt.seed = 17;
  const auto x = discover_channel(a, opt);
  const auto y = discover_channel(b, opt);
  CHECK(x.probes == y.probes);
  CHECK(x.posterior == y.posterior);
  CHECK_FALSE(x.probes.empty());
}

TEST_CASE("plug-in mutual information matches the entropy identity") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    Table2x2 t{};
    for (auto& row : t) {
      for (auto& c : row) c = rng() % 50;
    }
    const double n = static_cast<double>(t[0][0] + t[0][1] + t[1][0] + t[1][1]);
    if (n == 0) continue;
    std::vector<double> joint, px(2, 0.0), py(2, 0.0);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double p = static_cast<double>(t[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]) / n;
        joint.push_back(p);
        px[static_cast<std::size_t>(x)] += p;
        py[static_cast<std::size_t>(y)] += p;
      }
    }
    CHECK(mutual_information(t) == doctest::Approx(entropy(px) + entropy(py) - entropy(joint)).epsilon(1e-9));
  }
  CHECK(mutual_information({{{10, 0}, {0, 10}}}) == doctest::Approx(1.0));
  CHECK(mutual_information({{{5, 5}, {5, 5}}}) == doctest::Approx(0.0));
  CHECK(mutual_information({}) == 0.0);
  CHECK(mi_noise_floor(100, 10.83) == doctest::Approx(10.83 / (200 * std::log(2.0))));
}

TEST_CASE("the planted reward signal is identified") {
  for (int signal : {1, 2}) {
    auto agent = planted(0, "raw", signal);
    RewardProbeOptions opt;
    opt.seed = static_cast<std::uint64_t>(signal);
    const auto r = infer_reward(agent, opt);
    CAPTURE(signal);
    REQUIRE(r.reward_signal);
    CHECK(*r.reward_signal == signal);
    CHECK(r.conclusive);
    CHECK(r.signal_mi.at(signal) > r.threshold);
    CHECK(r.signal_mi.at(3 - signal) < r.threshold);
  }
}

TEST_CASE("an agent indifferent to every signal is inconclusive") {
  agents::RandomAgent agent(26, 2);
  const auto r = infer_reward(agent, {});
  CHECK_FALSE(r.conclusive);
  CHECK_FALSE(r.reward_signal);

  auto scalar_only = planted(0);
  CHECK_FALSE(infer_reward(scalar_only, {}).conclusive);
}

TEST_CASE("two equally effective signals leave low confidence") {
  TwoSignalAgent agent;
  const auto r = infer_reward(agent, {});
  CHECK(r.signal_mi.at(1) > r.threshold);
  CHECK(r.signal_mi.at(2) > r.threshold);
  CHECK(r.confidence < 0.5);
}

TEST_CASE("reward probe arguments") {
  agents::SilentAgent agent;
  RewardProbeOptions opt;
  opt.candidates = {1, 2, 3, 4};
  CHECK_THROWS_AS(infer_reward(agent, opt), std::invalid_argument);
  opt.candidates = {};
  CHECK_THROWS_AS(infer_reward(agent, opt), std::invalid_argument);
}
