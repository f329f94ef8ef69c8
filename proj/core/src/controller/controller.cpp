#include "uat/controller/controller.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "uat/interface/percept.hpp"

namespace uat::controller {

SweepPolicy::SweepPolicy(const TaskClass& cls, const ConfigurationSpace& space, PolicyParams params)
    : cls_(&cls), space_(&space), params_(params) {
  if (cls.empty()) throw std::invalid_argument("selection needs a non-empty task class");
  if (space.empty()) throw std::invalid_argument("selection needs a non-empty configuration space");
  if (params.window < 1 || params.good < 1 || params.good > params.window) {
    throw std::invalid_argument("policy window/good out of range");
  }
  for (int l = 0; l < space.time_level_count(); ++l) {
    auto ids = space.level(l);
    if (l % 2 == 1) std::reverse(ids.begin(), ids.end());
    order_.insert(order_.end(), ids.begin(), ids.end());
  }
  std::mt19937_64 rng(params.seed);
  perms_.resize(static_cast<std::size_t>(cls.stratum_count()));
  for (int s = 0; s < cls.stratum_count(); ++s) {
    auto& p = perms_[static_cast<std::size_t>(s)];
    p = cls.stratum(s);
    std::shuffle(p.begin(), p.end(), rng);
  }
  cursor_.assign(perms_.size(), 0);
  config_ = order_.front();
  stratum_ = first_stratum();
}

int SweepPolicy::first_stratum() const {
  for (std::size_t s = 0; s < perms_.size(); ++s) {
    if (!perms_[s].empty()) return static_cast<int>(s);
  }
  throw std::logic_error("task class without strata");
}

Selection SweepPolicy::propose() const {
  const auto& perm = perms_[static_cast<std::size_t>(stratum_)];
  const std::size_t k = cursor_[static_cast<std::size_t>(stratum_)] % perm.size();
  return Selection{perm[k], config_, stratum_, space_->at(config_).time.episode_ticks()};
}

void SweepPolicy::observe(const HistoryEntry& e) {
  if (e.stratum < 0 || static_cast<std::size_t>(e.stratum) >= perms_.size() ||
      e.config_id < 0 || static_cast<std::size_t>(e.config_id) >= space_->size()) {
    throw std::invalid_argument("history entry outside the class or space");
  }
  ++cursor_[static_cast<std::size_t>(e.stratum)];
  seen_.push_back(e);
  if (e.config_id != config_ || e.stratum != stratum_) {
    // Follow the history even where it departs from our own proposals.
    config_ = e.config_id;
    stratum_ = e.stratum;
    if (!exploiting_) {
      auto it = std::find(order_.begin(), order_.end(), config_);
      pos_ = static_cast<std::size_t>(it - order_.begin());
    }
    window_.clear();
  }
  window_.push_back(e.result.score);
  const auto ones = static_cast<int>(std::count_if(window_.begin(), window_.end(),
                                                   [](double s) { return s >= 0.5; }));
  const int zeros = static_cast<int>(window_.size()) - ones;
  if (ones >= params_.good) {
    raise();
  } else if (zeros > params_.window - params_.good) {
    advance();
  } else if (static_cast<int>(window_.size()) >= params_.window) {
    window_.clear();
  }
}

void SweepPolicy::raise() {
  window_.clear();
  for (auto s = static_cast<std::size_t>(stratum_) + 1; s < perms_.size(); ++s) {
    if (!perms_[s].empty()) {
      stratum_ = static_cast<int>(s);
      return;
    }
  }
  advance();
}

void SweepPolicy::advance() {
  window_.clear();
  stratum_ = first_stratum();
  if (!exploiting_ && pos_ + 1 < order_.size()) {
    config_ = order_[++pos_];
    return;
  }
  exploiting_ = true;
  config_ = best();
}

int SweepPolicy::best() const {
  const UEstimate u = u_estimate(seen_, params_.estimate);
  if (u.best_config) return *u.best_config;
  // Nothing has reached the floor yet: take the best aggregate seen at all.
  std::optional<int> pick;
  double value = -1.0;
  for (const auto& [cfg, cs] : u.per_config) {
    if (cs.aggregate > value) {
      value = cs.aggregate;
      pick = cfg;
    }
  }
  return pick ? *pick : order_.front();
}

Selection select_next(const History& h, const TaskClass& cls, const ConfigurationSpace& space,
                      const PolicyParams& params) {
  SweepPolicy policy(cls, space, params);
  for (const auto& e : h) policy.observe(e);
  return policy.propose();
}

TestSession::TestSession(const TaskClass& cls, const ConfigurationSpace& space, SessionOptions options)
    : cls_(&cls),
      space_(&space),
      options_(options),
      policy_(std::make_unique<SweepPolicy>(cls, space, options.policy)) {}

const HistoryEntry& TestSession::record(const Selection& s, const EpisodeResult& result) {
  const Task& t = task(s);
  HistoryEntry e;
  e.start_tick = clock_;
  e.tau = s.tau;
  e.task_id = t.id;
  e.config_id = s.config_id;
  e.stratum = s.stratum;
  e.weight = cls_->weight(s.task_index);
  e.result = result;
  e.result.config_id = s.config_id;
  policy_->observe(e);
  history_.push_back(std::move(e));
  clock_ += s.tau;
  return history_.back();
}

EpisodeResult run_episode(agents::Agent& agent, const Task& task, const Configuration& cfg,
                          int channels, std::uint64_t start_tick, double& reward) {
  interface::PerceptStream stream(task, cfg, channels, start_tick);
  std::optional<refmachine::Symbol> response;
  std::optional<std::uint64_t> latency;
  while (!stream.done()) {
    const auto frame = stream.next();
    const std::uint64_t now = frame.front().tick;
    const auto action = agent.act(frame, reward);
    reward = 0.0;
    if (!response && action.answer && stream.in_working_window(now)) {
      response = action.answer;
      latency = now - stream.working_start();
      reward = *response == task.answer ? 1.0 : 0.0;
    }
  }
  // Left in `reward` when the answer came on the last tick.
  return taskgen::score_response(task, response, cfg.id, latency);
}

TestOutcome run_anytime_test(agents::Agent& agent, const TaskClass& cls, const ConfigurationSpace& space,
                             std::uint64_t budget, std::uint64_t seed, SessionOptions options,
                             const EpisodeHook& hook) {
  options.policy.seed = seed;
  TestSession session(cls, space, options);
  agent.reset();
  double reward = 0.0;
  while (true) {
    const Selection s = session.next();
    if (session.clock() + s.tau > budget) break;
    if (options.reset_per_episode) {
      agent.reset();
      reward = 0.0;
    }
    const auto result =
        run_episode(agent, session.task(s), session.config(s), space.channels(), session.clock(), reward);
    session.record(s, result);
    if (hook && !hook(session)) break;
  }
  return TestOutcome{session.estimate(), session.history(), session.clock()};
}

}  // namespace uat::controller
