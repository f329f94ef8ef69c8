#include "uat/harness/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "uat/controller/controller.hpp"
#include "uat/discovery/discovery.hpp"

namespace uat::harness {

namespace {

std::uint64_t salted(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void check_alphabet(const ExperimentSpec& spec, const taskgen::Bank& bank) {
  const int a = bank.tasks.alphabet();
  std::vector<Diagnostic> d;
  for (const auto& c : spec.configurations) {
    if (c.resolution.alphabet != a) {
      d.push_back({"configurations[" + std::to_string(c.id) + "].alphabet",
                   "is " + std::to_string(c.resolution.alphabet) + " but the bank uses " + std::to_string(a)});
    }
  }
  if (!d.empty()) throw SpecInvalid(d);
}

}  // namespace

SessionRecord run_session(const ExperimentSpec& spec, const taskgen::Bank& bank, agents::Agent& agent,
                          const std::string& agent_label, std::uint64_t seed) {
  check_alphabet(spec, bank);
  const auto space = spec.space();
  SessionRecord rec;
  rec.agent = agent_label;
  rec.level = spec.level;
  rec.seed = seed;
  rec.spec = to_json(spec);
  rec.estimate_options = spec.estimate;
  rec.started = utc_now();
  for (const auto& c : space.configs()) rec.configurations.push_back(c.label());

  std::vector<int> subset;
  if (spec.level == 1) {
    subset.push_back(spec.configuration);
  } else if (spec.level == 2) {
    for (const auto& c : space.configs()) subset.push_back(c.id);
  } else {
    std::optional<int> signal;
    if (spec.level == 4) {
      discovery::RewardProbeOptions ro;
      ro.channels = spec.channels;
      ro.candidates = spec.discovery.signals;
      ro.windows = spec.discovery.windows;
      ro.seed = salted(seed, 1);
      rec.reward_discovery = discovery::infer_reward(agent, ro);
      if (!rec.reward_discovery->conclusive) {
        rec.halted = "reward inference inconclusive";
      } else {
        signal = rec.reward_discovery->reward_signal;
      }
    }
    if (!rec.halted) {
      discovery::ChannelProbeOptions co;
      co.channels = spec.channels;
      co.alphabet = bank.tasks.alphabet();
      std::set<std::string> codecs;
      for (const auto& c : space.configs()) codecs.insert(c.resolution.codec);
      co.codecs.assign(codecs.begin(), codecs.end());
      co.time = spec.discovery.time;
      co.repeats = spec.discovery.repeats;
      co.blanks = spec.discovery.blanks;
      co.threshold = spec.discovery.threshold;
      co.reward_signal = signal;
      co.seed = salted(seed, 2);
      rec.channel_discovery = discovery::discover_channel(agent, co);
      if (!rec.channel_discovery->conclusive) {
        rec.halted = "channel discovery inconclusive";
      } else {
        for (const auto& c : space.configs()) {
          if (c.resolution.channel == *rec.channel_discovery->channel) subset.push_back(c.id);
        }
        if (subset.empty()) rec.halted = "no configuration on the discovered channel";
      }
    }
  }

  if (!rec.halted) {
    std::vector<interface::Configuration> configs;
    for (int id : subset) configs.push_back(space.at(id));
    const interface::ConfigurationSpace sub(configs, spec.channels);
    controller::SessionOptions so;
    so.policy.estimate = spec.estimate;
    so.reset_per_episode = spec.reset_per_episode;
    auto outcome = controller::run_anytime_test(agent, bank.tasks, sub, spec.budget, seed, so);
    rec.history = std::move(outcome.history);
    for (auto& e : rec.history) {
      e.config_id = subset[static_cast<std::size_t>(e.config_id)];
      e.result.config_id = e.config_id;
    }
  }
  rec.estimate = controller::u_estimate(rec.history, spec.estimate);
  rec.finished = utc_now();
  return rec;
}

SessionRecord run_session(const ExperimentSpec& spec, const taskgen::Bank& bank, std::size_t agent_index,
                          std::uint64_t seed, std::shared_ptr<agents::PredictionCache> cache) {
  const auto& text = spec.agents.at(agent_index);
  if (text == "human") {
    throw SpecInvalid("agents[" + std::to_string(agent_index) + "]", "human subjects run through the session service");
  }
  if (!cache) cache = std::make_shared<agents::PredictionCache>(spec.agent_budget);
  auto agent = agents::make_agent(text, seed, cache);
  auto rec = run_session(spec, bank, *agent, text, seed);
  rec.id = "a" + std::to_string(agent_index) + "-s" + std::to_string(seed);
  return rec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads) {
  const auto bank = resolve_bank(spec);
  check_alphabet(spec, bank);
  auto cache = std::make_shared<agents::PredictionCache>(spec.agent_budget);
  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (std::size_t a = 0; a < spec.agents.size(); ++a) {
    for (auto s : spec.seeds) jobs.emplace_back(a, s);
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  ExperimentResult out;
  out.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      out.records[i] = run_session(spec, bank, jobs[i].first, jobs[i].second, cache);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(threads, jobs.size()); ++t) {
    pool.push_back(std::async(std::launch::async, worker));
  }
  worker();
  for (auto& f : pool) f.get();
  out.summary = summarize(out.records);
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<SessionRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<std::map<std::string, int>> best_votes;
  std::vector<std::map<int, int>> reach_votes;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SummaryRow& x) { return x.agent == r.agent && x.level == r.level; });
    if (it == rows.end()) {
      rows.push_back({r.agent, r.level});
      best_votes.emplace_back();
      reach_votes.emplace_back();
      it = rows.end() - 1;
    }
    const auto i = static_cast<std::size_t>(it - rows.begin());
    ++it->runs;
    if (!r.estimate.evaluated()) {
      ++it->unevaluated;
      continue;
    }
    it->u += r.estimate.value;
    if (r.estimate.best_config) {
      const auto id = static_cast<std::size_t>(*r.estimate.best_config);
      ++best_votes[i][id < r.configurations.size() ? r.configurations[id] : std::to_string(id)];
    }
    if (r.estimate.reach) ++reach_votes[i][*r.estimate.reach];
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const auto evaluated = row.runs - row.unevaluated;
    row.u = evaluated ? row.u / static_cast<double>(evaluated) : 0.0;
    int top = 0;
    row.best = "-";
    for (const auto& [label, n] : best_votes[i]) {
      if (n > top) {
        top = n;
        row.best = label;
      }
    }
    top = 0;
    for (const auto& [s, n] : reach_votes[i]) {
      if (n > top) {
        top = n;
        row.reach = s;
      }
    }
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "agent\tlevel\truns\tunevaluated\tU\tbest\treach\n";
  char u[32];
  for (const auto& r : rows) {
    std::snprintf(u, sizeof u, "%.4f", r.u);
    out << r.agent << '\t' << r.level << '\t' << r.runs << '\t' << r.unevaluated << '\t' << u << '\t' << r.best
        << '\t' << r.reach << '\n';
  }
}

void write_curves(std::ostream& out, const std::vector<SessionRecord>& records) {
  out << "session\tepisode\tconfig\tepisodes\taggregate\n";
  char a[32];
  for (const auto& r : records) {
    std::map<int, controller::History> by_config;
    controller::EstimateOptions opts = r.estimate_options;
    opts.episode_floor = 0;
    for (std::size_t n = 0; n < r.history.size(); ++n) {
      const auto& e = r.history[n];
      auto& h = by_config[e.config_id];
      h.push_back(e);
      const auto u = controller::u_estimate(h, opts);
      std::snprintf(a, sizeof a, "%.6f", u.value);
      const auto id = static_cast<std::size_t>(e.config_id);
      out << r.id << '\t' << n << '\t' << (id < r.configurations.size() ? r.configurations[id] : std::to_string(id))
          << '\t' << h.size() << '\t' << a << '\n';
    }
  }
}

std::vector<AuditFinding> audit(const std::vector<SessionRecord>& records) {
  std::vector<AuditFinding> out;
  for (const auto& r : records) {
    std::uint64_t clock = r.history.empty() ? 0 : r.history.front().start_tick;
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      const auto& e = r.history[i];
      if (e.start_tick != clock) {
        out.push_back({r.id, "episode " + std::to_string(i) + " starts at tick " + std::to_string(e.start_tick) +
                                 ", expected " + std::to_string(clock)});
      }
      clock = e.start_tick + e.tau;
      if (e.config_id < 0 || static_cast<std::size_t>(e.config_id) >= r.configurations.size()) {
        out.push_back({r.id, "episode " + std::to_string(i) + " names unknown configuration " +
                                 std::to_string(e.config_id)});
      }
    }
    if (r.halted && !r.history.empty()) out.push_back({r.id, "halted session has a history"});
    if (controller::u_estimate(r.history, r.estimate_options) != r.estimate) {
      out.push_back({r.id, "stored estimate differs from the one recomputed from its history"});
    }
  }
  return out;
}

}  // namespace uat::harness
