#include <doctest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "uat/agents/agent.hpp"
#include "uat/controller/controller.hpp"

using namespace uat;
using namespace uat::controller;

namespace {

HistoryEntry entry(const TaskClass& cls, std::size_t task, int config, double score, std::uint64_t start = 0) {
  HistoryEntry e;
  e.start_tick = start;
  e.tau = 2;
  e.task_id = cls.task(task).id;
  e.config_id = config;
  e.stratum = cls.stratum_of(task);
  e.weight = cls.weight(task);
  e.result = {e.task_id, score, std::nullopt, config};
  return e;
}

// Feeds the policy's own proposals back with the given scores.
History follow(const TaskClass& cls, const ConfigurationSpace& space, const std::vector<double>& scores,
               std::uint64_t seed = 0) {
  TestSession session(cls, space, {{3, 2, seed, {}}, false});
  for (double s : scores) {
    const auto sel = session.next();
    session.record(sel, {session.task(sel).id, s, std::nullopt, sel.config_id});
  }
  return session.history();
}

int differing_components(const interface::Configuration& a, const interface::Configuration& b) {
  return (a.time != b.time) + (a.resolution.codec != b.resolution.codec) +
         (a.resolution.channel != b.resolution.channel) + (a.resolution.alphabet != b.resolution.alphabet);
}

agents::ChannelSensitiveAgent planted(int channel = 2) {
  agents::ChannelSensitiveAgent::Params p;
  p.channel = channel;
  p.min_exposition = 2;
  return agents::ChannelSensitiveAgent(p, 11);
}

}  // namespace

TEST_CASE("u_estimate on a hand-made history") {
  const auto& cls = test::easy_class();
  const auto s0 = cls.stratum(0);
  const auto s1 = cls.stratum(1);
  History h;
  for (int i = 0; i < 5; ++i) h.push_back(entry(cls, s0[static_cast<std::size_t>(i)], 1, 1.0));
  h.push_back(entry(cls, s1[0], 1, 0.0));
  for (int i = 0; i < 3; ++i) h.push_back(entry(cls, s0[static_cast<std::size_t>(i)], 0, 1.0));

  const auto u = u_estimate(h);
  CHECK(u.episodes == 9);
  REQUIRE(u.per_config.size() == 2);
  CHECK(u.per_config.at(0).episodes == 3);
  CHECK(u.per_config.at(0).aggregate == 1.0);
  CHECK(u.per_config.at(1).aggregate == doctest::Approx(5.0 / 6.0));
  // Config 0 scores higher but is below the floor.
  REQUIRE(u.best_config);
  CHECK(*u.best_config == 1);
  CHECK(u.value == u.per_config.at(1).aggregate);
  CHECK(u.reach == 0);

  const auto low_floor = u_estimate(h, {AggregateMode::ProbabilityWeighted, 1});
  CHECK(*low_floor.best_config == 0);
  CHECK(low_floor.value == 1.0);

  const auto means = stratum_means(h, 1);
  CHECK(means.at(0) == 1.0);
  CHECK(means.at(1) == 0.0);
}

TEST_CASE("no configuration at the floor means no estimate") {
  const auto& cls = test::easy_class();
  const History h{entry(cls, 0, 0, 1.0), entry(cls, 1, 0, 1.0)};
  const auto u = u_estimate(h);
  CHECK(u.evaluated());
  CHECK_FALSE(u.best_config);
  CHECK(u.value == 0.0);
  CHECK_FALSE(u_estimate({}).evaluated());
}

TEST_CASE("per-configuration scores agree with the task-class aggregate") {
  const auto& cls = test::easy_class();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    History h;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      h.push_back(entry(cls, rng() % cls.size(), static_cast<int>(rng() % 3), static_cast<double>(rng() % 2)));
    }
    for (auto mode : {AggregateMode::ProbabilityWeighted, AggregateMode::Stratified}) {
      const auto u = u_estimate(h, {mode, 1});
      for (const auto& [cfg, score] : u.per_config) {
        std::vector<taskgen::EpisodeResult> results;
        for (const auto& e : h) {
          if (e.config_id == cfg) results.push_back(e.result);
        }
        CHECK(score.aggregate == doctest::Approx(taskgen::aggregate(results, cls, mode)).epsilon(1e-12));
        CHECK(score.episodes == results.size());
      }
      // The estimate is the maximum over configurations.
      double top = 0.0;
      for (const auto& [cfg, score] : u.per_config) top = std::max(top, score.aggregate);
      CHECK(u.value == top);
    }
  }
}

TEST_CASE("select_next on an empty history") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  const auto s = select_next({}, cls, space);
  CHECK(s.config_id == 0);
  CHECK(s.stratum == 0);
  CHECK(cls.stratum_of(s.task_index) == 0);
  CHECK(s.tau == 2);
}

TEST_CASE("doing well raises the stratum") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  const auto h = follow(cls, space, {1.0, 1.0});
  const auto s = select_next(h, cls, space);
  CHECK(s.config_id == h.back().config_id);
  CHECK(s.stratum == h.back().stratum + 1);
}

TEST_CASE("doing poorly moves to a neighbouring configuration") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  std::vector<double> scores;
  for (std::size_t step = 0; step + 1 < space.size(); ++step) {
    scores.push_back(0.0);
    scores.push_back(0.0);
    const auto h = follow(cls, space, scores);
    const auto s = select_next(h, cls, space);
    CAPTURE(step);
    CHECK(differing_components(space.at(h.back().config_id), space.at(s.config_id)) == 1);
    CHECK(s.stratum == 0);
  }
}

TEST_CASE("the sweep covers every configuration, then exploits") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  SweepPolicy policy(cls, space);
  CHECK(policy.order() == std::vector<int>{0, 1, 2, 3, 7, 6, 5, 4});
  const auto h = follow(cls, space, std::vector<double>(16, 0.0));
  std::set<int> seen;
  for (const auto& e : h) seen.insert(e.config_id);
  CHECK(seen.size() == 8);
}

TEST_CASE("a budget below one episode leaves the test unevaluated") {
  auto agent = planted();
  const auto out = run_anytime_test(agent, test::easy_class(), test::eight_configs(), 1, 1);
  CHECK_FALSE(out.estimate.evaluated());
  CHECK(out.history.empty());
  CHECK(out.ticks_used == 0);
}

TEST_CASE("a perfect solver on one configuration scores 1") {
  agents::EnumerativeInductor agent("raw", 26);
  const interface::ConfigurationSpace one(std::vector<interface::Configuration>{{0, {1, 1}, {}}});
  const auto out = run_anytime_test(agent, test::easy_class(), one, 80, 4);
  CHECK(out.history.size() == 40);
  REQUIRE(out.estimate.best_config);
  CHECK(out.estimate.value == 1.0);
  CHECK(out.estimate.reach == 1);
}

TEST_CASE("the planted configuration is found") {
  auto agent = planted();
  const auto space = test::eight_configs();
  const auto out = run_anytime_test(agent, test::easy_class(), space, 200, 2);
  REQUIRE(out.estimate.best_config);
  CHECK(space.at(*out.estimate.best_config).label() == "e2w2/raw/c2");
  CHECK(out.estimate.value == 1.0);
}

TEST_CASE("a larger budget only extends the history") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto agent = planted(static_cast<int>(seed % 4));
    History prev;
    for (std::uint64_t budget : {10, 40, 90, 160}) {
      const auto out = run_anytime_test(agent, cls, space, budget, seed);
      REQUIRE(out.history.size() >= prev.size());
      CHECK(std::equal(prev.begin(), prev.end(), out.history.begin()));
      CHECK(out.ticks_used <= budget);
      prev = out.history;
    }
  }
}

TEST_CASE("runs are reproducible") {
  auto a = agents::make_agent("tabular epsilon=0.2", 5);
  auto b = agents::make_agent("tabular epsilon=0.2", 5);
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  const auto x = run_anytime_test(*a, cls, space, 150, 9);
  const auto y = run_anytime_test(*b, cls, space, 150, 9);
  CHECK(x.history == y.history);
  CHECK(x.estimate == y.estimate);
  // The agent is reset at the start, so running again changes nothing.
  CHECK(run_anytime_test(*a, cls, space, 150, 9).history == x.history);
}

TEST_CASE("with a reset per episode no episode depends on another") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  SessionOptions opt;
  opt.reset_per_episode = true;
  auto learner = agents::make_agent("tabular epsilon=0.3", 21);
  const auto out = run_anytime_test(*learner, cls, space, 120, 6, opt);
  REQUIRE(!out.history.empty());
  // Replaying any single episode on a fresh agent gives the same result.
  for (const auto& e : out.history) {
    auto fresh = agents::make_agent("tabular epsilon=0.3", 21);
    double reward = 0.0;
    const auto r = run_episode(*fresh, cls.task(cls.index_of(e.task_id)), space.at(e.config_id), space.channels(),
                               e.start_tick, reward);
    CHECK(r == e.result);
  }
}

TEST_CASE("interrupting after any episode gives the estimate of that prefix") {
  const auto& cls = test::easy_class();
  const auto space = test::eight_configs();
  auto agent = planted();
  const auto full = run_anytime_test(agent, cls, space, 120, 3);
  for (std::size_t stop = 1; stop <= full.history.size(); ++stop) {
    const auto cut = run_anytime_test(agent, cls, space, 120, 3, {},
                                      [&](const TestSession& s) { return s.history().size() < stop; });
    REQUIRE(cut.history.size() == stop);
    const History prefix(full.history.begin(), full.history.begin() + static_cast<std::ptrdiff_t>(stop));
    CHECK(cut.history == prefix);
    CHECK(cut.estimate == u_estimate(prefix));
    CHECK(cut.estimate.value >= 0.0);
    CHECK(cut.estimate.value <= 1.0);
  }
}

TEST_CASE("policy argument checks") {
  const auto& cls = test::easy_class();
  CHECK_THROWS_AS(SweepPolicy(cls, interface::ConfigurationSpace{}), std::invalid_argument);
  CHECK_THROWS_AS(SweepPolicy(cls, test::eight_configs(), {4, 5, 0, {}}), std::invalid_argument);
  SweepPolicy p(cls, test::eight_configs());
  auto bad = entry(cls, 0, 12, 1.0);
  CHECK_THROWS_AS(p.observe(bad), std::invalid_argument);
}
