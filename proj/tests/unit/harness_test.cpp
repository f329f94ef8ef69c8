#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "uat/harness/experiment.hpp"

using namespace uat;
using namespace uat::harness;

namespace {

const char* kSpec = R"({
  "name": "unit",
  "bank": "bank.tsv",
  "channels": 4,
  "grid": {"times": [{"exposition": 1, "working": 1}, {"exposition": 2, "working": 2}], "codecs": ["raw"]},
  "agents": ["channel channel=2 exposition=2", "random"],
  "level": 2,
  "budget": 120,
  "seeds": [1, 2]
})";

ExperimentSpec unit_spec(int level = 2) {
  auto s = parse_spec(kSpec, UAT_DATA_DIR);
  s.level = level;
  return s;
}

bool has_field(const SpecInvalid& e, const std::string& field) {
  for (const auto& d : e.diagnostics()) {
    if (d.field == field) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a valid spec parses") {
  const auto s = unit_spec();
  CHECK(s.name == "unit");
  CHECK(s.configurations.size() == 8);
  CHECK(s.agents.size() == 2);
  CHECK(s.seeds == std::vector<std::uint64_t>{1, 2});
  REQUIRE(s.bank_path);
  CHECK(s.bank_path->find("bank.tsv") != std::string::npos);
}

TEST_CASE("every problem in a spec is reported with its field") {
  const char* bad = R"({
    "bank": "bank.tsv",
    "grid": {"times": [{"exposition": 0, "working": 1}], "codecs": ["morse"]},
    "agents": ["threshold", "wizard"],
    "level": 7,
    "budget": 0,
    "colour": "red"
  })";
  try {
    parse_spec(bad, UAT_DATA_DIR);
    FAIL("expected SpecInvalid");
  } catch (const SpecInvalid& e) {
    CHECK(e.diagnostics().size() >= 6);
    CHECK(has_field(e, "colour"));
    CHECK(has_field(e, "level"));
    CHECK(has_field(e, "budget"));
    CHECK(has_field(e, "agents[0]"));
    CHECK(has_field(e, "agents[1]"));
    CHECK(has_field(e, "grid.codecs"));
    CHECK(std::string(e.what()).find("level") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec("{not json", ""), SpecInvalid);
  CHECK_THROWS_AS(parse_spec(R"({"agents": ["random"], "grid": {"times": [{"exposition": 1, "working": 1}]}})", ""),
                  SpecInvalid);
}

TEST_CASE("specs survive a trip through canonical JSON") {
  auto s = unit_spec();
  s.discovery.signals = {1, 2, 3};
  s.estimate.mode = taskgen::AggregateMode::Stratified;
  s.reset_per_episode = true;
  const auto text = to_json(s);
  CHECK(to_json(parse_spec(text)) == text);
}

TEST_CASE("session records round-trip bit for bit") {
  const auto spec = unit_spec(3);
  const auto rec = run_session(spec, test::easy_bank(), 0, 5);
  REQUIRE(rec.channel_discovery);
  CHECK_FALSE(rec.halted);
  CHECK(rec.estimate.evaluated());
  const auto line = to_json_line(rec);
  CHECK(line.find('\n') == std::string::npos);
  const auto back = record_from_json(line);
  CHECK(to_json_line(back) == line);
  CHECK(back.history == rec.history);
  CHECK(back.estimate == rec.estimate);
  CHECK(back.channel_discovery->probes == rec.channel_discovery->probes);

  std::stringstream io;
  write_records(io, {rec, rec});
  const auto many = read_records(io);
  CHECK(many.size() == 2);

  std::stringstream h(history_to_jsonl(rec.history));
  CHECK(history_from_jsonl(h) == rec.history);
}

TEST_CASE("level 3 searches only the discovered channel, in original ids") {
  const auto spec = unit_spec(3);
  const auto space = spec.space();
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto rec = run_session(spec, test::easy_bank(), 0, seed);
    REQUIRE(rec.channel_discovery);
    REQUIRE(rec.channel_discovery->channel);
    CHECK(*rec.channel_discovery->channel == 2);
    for (const auto& e : rec.history) CHECK(space.at(e.config_id).resolution.channel == 2);
    REQUIRE(rec.estimate.best_config);
    CHECK(rec.configurations.at(static_cast<std::size_t>(*rec.estimate.best_config)) == "e2w2/raw/c2");
    CHECK(rec.estimate.value == 1.0);
  }
}

TEST_CASE("level 4 with an agent that ignores every signal halts unevaluated") {
  const auto spec = unit_spec(4);
  const auto rec = run_session(spec, test::easy_bank(), 1, 1);
  REQUIRE(rec.halted);
  CHECK(rec.history.empty());
  CHECK_FALSE(rec.estimate.evaluated());
  REQUIRE(rec.reward_discovery);
  CHECK_FALSE(rec.reward_discovery->conclusive);
  CHECK(audit({rec}).empty());
}

TEST_CASE("level 4 finds the planted signal and then the channel") {
  auto spec = unit_spec(4);
  spec.agents = {"channel channel=1 exposition=2 signal=2"};
  const auto rec = run_session(spec, test::easy_bank(), 0, 3);
  CHECK_FALSE(rec.halted);
  REQUIRE(rec.reward_discovery);
  CHECK(rec.reward_discovery->reward_signal == 2);
  REQUIRE(rec.channel_discovery);
  CHECK(rec.channel_discovery->channel == 1);
  CHECK(rec.estimate.value == 1.0);
}

TEST_CASE("audit catches tampering") {
  const auto rec = run_session(unit_spec(2), test::easy_bank(), 0, 7);
  REQUIRE(rec.history.size() > 3);
  CHECK(audit({rec}).empty());

  auto score = rec;
  score.history[2].result.score = 1.0 - score.history[2].result.score;
  CHECK_FALSE(audit({score}).empty());

  auto value = rec;
  value.estimate.value = std::nextafter(value.estimate.value, 0.0);
  CHECK_FALSE(audit({value}).empty());

  auto gap = rec;
  gap.history[1].start_tick += 1;
  CHECK_FALSE(audit({gap}).empty());

  auto range = rec;
  range.history[0].config_id = 99;
  CHECK_FALSE(audit({range}).empty());
}

TEST_CASE("experiments summarize per agent and reproduce") {
  const auto spec = unit_spec(2);
  const auto a = run_experiment(spec, 2);
  const auto b = run_experiment(spec, 1);
  REQUIRE(a.records.size() == 4);
  REQUIRE(a.summary.size() == 2);
  CHECK(a.summary[0].agent == "channel channel=2 exposition=2");
  CHECK(a.summary[0].runs == 2);
  CHECK(a.summary[0].u == 1.0);
  CHECK(a.summary[0].best == "e2w2/raw/c2");
  CHECK(a.summary[1].u < 0.2);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].history == b.records[i].history);
    CHECK(a.records[i].estimate == b.records[i].estimate);
  }

  std::ostringstream x, y;
  write_summary(x, summarize(a.records));
  write_summary(y, summarize(b.records));
  CHECK(x.str() == y.str());
  const auto table = x.str();
  CHECK(table.rfind("agent\tlevel\truns\tunevaluated\tU\tbest\treach\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);

  std::ostringstream curves;
  write_curves(curves, a.records);
  CHECK(curves.str().rfind("session\tepisode\tconfig\tepisodes\taggregate\n", 0) == 0);
}

TEST_CASE("empty reports still have their headers") {
  std::ostringstream s, c;
  write_summary(s, summarize({}));
  write_curves(c, {});
  CHECK(s.str() == "agent\tlevel\truns\tunevaluated\tU\tbest\treach\n");
  CHECK(c.str() == "session\tepisode\tconfig\tepisodes\taggregate\n");
}
