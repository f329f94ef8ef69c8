#include <doctest.h>

#include "support.hpp"
#include "uat/agents/agent.hpp"
#include "uat/controller/controller.hpp"
#include "uat/taskgen/task.hpp"

using namespace uat;
using namespace uat::agents;

namespace {

const taskgen::Task& adgj() {
  static const auto t = taskgen::make_task(refmachine::Program::parse("LOOP* EMIT ADD3 END"), 4, {12, 4096});
  return t;
}

Frame frame_with(int channels, int channel, std::string payload, std::uint64_t tick = 0) {
  auto f = interface::null_frame(tick, channels);
  f[static_cast<std::size_t>(channel)].payload = std::move(payload);
  return f;
}

double play(Agent& agent, const taskgen::Task& task, const interface::Configuration& cfg,
            std::uint64_t start = 0) {
  double reward = 0.0;
  return controller::run_episode(agent, task, cfg, 4, start, reward).score;
}

// Three free-choice prompts: answer, (optionally) get the signal, answer again.
bool repeats_after(ChannelSensitiveAgent& agent, bool signal) {
  agent.reset();
  const auto first = agent.act(frame_with(2, 0, "*"), 0.0).answer;
  agent.act(frame_with(2, 0, signal ? "!1" : ""), 0.0);
  agent.act(frame_with(2, 0, ""), 0.0);
  const auto second = agent.act(frame_with(2, 0, "*"), 0.0).answer;
  REQUIRE(first);
  REQUIRE(second);
  return *first == *second;
}

}  // namespace

TEST_CASE("the inductor continues a d g j with m under every codec") {
  for (const auto& codec : interface::codec_ids()) {
    EnumerativeInductor agent(codec, 26);
    CAPTURE(codec);
    CHECK(play(agent, adgj(), {0, {1, 1}, {26, codec, 3}}) == 1.0);
  }
}

TEST_CASE("the inductor ignores series in other codecs") {
  EnumerativeInductor agent("radix", 26);
  CHECK(play(agent, adgj(), {0, {1, 1}, {26, "raw", 0}}) == 0.0);
}

TEST_CASE("threshold agent") {
  const double kt = adgj().difficulty.value;
  ThresholdAgent able(kt + 0.01, "raw", 26, 1);
  CHECK(play(able, adgj(), {0, {1, 1}, {}}) == 1.0);

  int correct = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    ThresholdAgent unable(kt - 0.01, "raw", 26, seed);
    correct += play(unable, adgj(), {0, {1, 1}, {}}) > 0.0;
  }
  // Uniform guessing: about 300 / 26.
  CHECK(correct > 2);
  CHECK(correct < 30);
}

TEST_CASE("reset restores the exact initial state") {
  const auto& cls = test::easy_class();
  for (const char* spec : {"random", "threshold d=9", "tabular epsilon=0.3", "channel channel=1"}) {
    CAPTURE(spec);
    auto agent = make_agent(spec, 77);
    std::vector<double> first, second;
    for (auto* out : {&first, &second}) {
      agent->reset();
      std::uint64_t tick = 0;
      for (std::size_t i = 0; i < 12; ++i) {
        const interface::Configuration cfg{0, {1, 1}, {26, "raw", static_cast<int>(i % 2)}};
        out->push_back(play(*agent, cls.task(i % cls.size()), cfg, tick));
        tick += 2;
      }
    }
    CHECK(first == second);
  }
}

TEST_CASE("random agent answers on any percept") {
  RandomAgent agent(26, 3);
  CHECK(agent.act(frame_with(4, 2, "?"), 0.0).answer);
  CHECK(agent.act(frame_with(4, 0, "x y"), 0.0).answer);
  CHECK_FALSE(agent.act(interface::null_frame(0, 4), 0.0).answer);
}

TEST_CASE("channel-sensitive agent scores exactly where it is compatible") {
  ChannelSensitiveAgent::Params p;
  p.channel = 2;
  p.min_exposition = 2;
  p.latency = 1;
  ChannelSensitiveAgent agent(p, 5);
  const auto& cls = test::easy_class();
  std::uint64_t tick = 0;
  int compatible = 0;
  for (std::uint32_t e = 1; e <= 3; ++e) {
    for (std::uint32_t w = 1; w <= 3; ++w) {
      for (int c = 0; c < 4; ++c) {
        const interface::Configuration cfg{0, {e, w}, {26, "raw", c}};
        // Twice on the same task, back to back, without a reset in between.
        for (int rep = 0; rep < 2; ++rep) {
          const auto& task = cls.task((e * 7 + w * 3 + static_cast<std::uint32_t>(c)) % cls.size());
          CAPTURE(cfg.label());
          CHECK(play(agent, task, cfg, tick) == (agent.compatible(cfg) ? 1.0 : 0.0));
          tick += cfg.time.episode_ticks();
        }
        compatible += agent.compatible(cfg);
      }
    }
  }
  // e in {2,3}, w in {2,3}, channel 2.
  CHECK(compatible == 4);
}

TEST_CASE("exposure does not carry across episodes of the same task") {
  ChannelSensitiveAgent::Params p;
  p.min_exposition = 2;
  ChannelSensitiveAgent agent(p, 1);
  const interface::Configuration short_look{0, {1, 1}, {}};
  CHECK(play(agent, adgj(), short_look, 0) == 0.0);
  CHECK(play(agent, adgj(), short_look, 2) == 0.0);
}

TEST_CASE("free choice: the rewarded answer is repeated") {
  ChannelSensitiveAgent::Params p;
  p.reward_signal = 1;
  int with = 0, without = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ChannelSensitiveAgent agent(p, seed);
    with += repeats_after(agent, true);
    without += repeats_after(agent, false);
  }
  CHECK(with > 160);
  CHECK(without < 30);
}

TEST_CASE("free choice: the wrong signal is not a reward") {
  ChannelSensitiveAgent::Params p;
  p.reward_signal = 2;
  int repeats = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ChannelSensitiveAgent agent(p, seed);
    repeats += repeats_after(agent, true);
  }
  CHECK(repeats < 30);
}

TEST_CASE("tabular learner improves on a repeated task") {
  TabularLearner agent(26, 0.05, 0.5, 9);
  double reward = 0.0;
  std::uint64_t tick = 0;
  const interface::Configuration cfg{0, {1, 1}, {}};
  int late = 0;
  for (int i = 0; i < 200; ++i) {
    const auto r = controller::run_episode(agent, adgj(), cfg, 4, tick, reward);
    tick += 2;
    if (i >= 150) late += r.score > 0.0;
  }
  CHECK(agent.table_size() == 1);
  CHECK(late >= 40);
}

TEST_CASE("prediction cache shares searches") {
  auto cache = std::make_shared<PredictionCache>();
  const auto a = cache->predict(refmachine::SymbolSequence::parse("adgj"), 26);
  const auto b = cache->predict(refmachine::SymbolSequence::parse("adgj"), 26);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->symbol == b->symbol);
  CHECK(refmachine::symbol_char(a->symbol) == 'm');
  CHECK(a->margin >= 1.0);
  CHECK(cache->size() == 1);
}

TEST_CASE("agent specs") {
  CHECK(make_agent("threshold d=10.5", 1)->name() == "threshold");
  CHECK(make_agent("channel channel=3 exposition=2 signal=1", 1)->name() == "channel");
  CHECK(make_agent("inductor codec=grid", 1)->name() == "inductor");
  CHECK_THROWS_AS(make_agent("oracle", 1), std::invalid_argument);
  CHECK_THROWS_AS(make_agent("threshold", 1), std::invalid_argument);
  CHECK_THROWS_AS(make_agent("random colour=red", 1), std::invalid_argument);
  CHECK_THROWS_AS(make_agent("tabular epsilon=lots", 1), std::invalid_argument);
  CHECK_THROWS_AS(make_agent("inductor codec=morse", 1), std::invalid_argument);
  CHECK(agent_names().size() == 6);
}
