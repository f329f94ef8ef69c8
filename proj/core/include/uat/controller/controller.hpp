#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "uat/agents/agent.hpp"
#include "uat/controller/history.hpp"
#include "uat/interface/config.hpp"
#include "uat/taskgen/task_class.hpp"

namespace uat::controller {

using interface::Configuration;
using interface::ConfigurationSpace;
using taskgen::Task;
using taskgen::TaskClass;

/// What to run next: a task, a configuration and the episode's tick budget.
struct Selection {
  std::size_t task_index = 0;
  int config_id = 0;
  int stratum = 0;
  std::uint64_t tau = 0;

  bool operator==(const Selection&) const = default;
};

/// Chooses the next episode from the history seen so far. Implementations
/// are deterministic given their construction arguments and observations.
class SelectionPolicy {
 public:
  virtual ~SelectionPolicy() = default;
  virtual void observe(const HistoryEntry& entry) = 0;
  virtual Selection propose() const = 0;
};

struct PolicyParams {
  /// Episodes judged at one (configuration, stratum) before moving on.
  int window = 3;
  /// Correct answers within the window that count as doing well. The window
  /// is decided early once the outcome can no longer change.
  int good = 2;
  std::uint64_t seed = 0;
  EstimateOptions estimate;
};

/// The default schedule.
///
/// Sweep: configurations are visited from the fastest time level to the
/// slowest; within a level the resolutions are walked in id order on even
/// levels and in reverse on odd ones, so consecutive configurations differ in
/// one component. Each configuration starts at the easiest stratum. Doing
/// well raises the stratum; doing poorly, or mastering the top stratum,
/// moves to the next configuration.
///
/// Exploit: after the sweep the policy returns to the current best
/// configuration and climbs again from the easiest stratum, re-reading the
/// best configuration every time it would have moved on.
///
/// Within a stratum tasks follow a seeded permutation, cycling.
class SweepPolicy final : public SelectionPolicy {
 public:
  SweepPolicy(const TaskClass& cls, const ConfigurationSpace& space, PolicyParams params = {});

  void observe(const HistoryEntry& entry) override;
  Selection propose() const override;

  bool exploiting() const { return exploiting_; }
  const std::vector<int>& order() const { return order_; }

 private:
  void raise();
  void advance();
  int best() const;
  int first_stratum() const;

  const TaskClass* cls_;
  const ConfigurationSpace* space_;
  PolicyParams params_;
  std::vector<int> order_;
  std::vector<std::vector<std::size_t>> perms_;
  std::vector<std::size_t> cursor_;
  History seen_;
  std::size_t pos_ = 0;
  bool exploiting_ = false;
  int config_ = 0;
  int stratum_ = 0;
  std::vector<double> window_;
};

/// The default policy's next selection after folding over H.
Selection select_next(const History& h, const TaskClass& cls, const ConfigurationSpace& space,
                      const PolicyParams& params = {});

struct SessionOptions {
  PolicyParams policy;
  /// Reset the agent before every episode, so no episode can learn from another.
  bool reset_per_episode = false;
};

/// Stepwise test: ask for the next selection, run it however you like, record
/// the result. Used directly by the session service; run_anytime_test drives
/// it with a software agent.
class TestSession {
 public:
  TestSession(const TaskClass& cls, const ConfigurationSpace& space, SessionOptions options = {});

  Selection next() const { return policy_->propose(); }
  const Task& task(const Selection& s) const { return cls_->task(s.task_index); }
  const Configuration& config(const Selection& s) const { return space_->at(s.config_id); }

  /// Appends one history entry starting at the current clock.
  const HistoryEntry& record(const Selection& s, const EpisodeResult& result);

  const History& history() const { return history_; }
  std::uint64_t clock() const { return clock_; }
  UEstimate estimate() const { return u_estimate(history_, options_.policy.estimate); }
  const SessionOptions& options() const { return options_; }
  const TaskClass& task_class() const { return *cls_; }
  const ConfigurationSpace& space() const { return *space_; }

 private:
  const TaskClass* cls_;
  const ConfigurationSpace* space_;
  SessionOptions options_;
  std::unique_ptr<SelectionPolicy> policy_;
  History history_;
  std::uint64_t clock_ = 0;
};

/// Presents one task and scores the first answer given inside the working
/// window. `reward` is delivered to the agent with its next act() call and is
/// updated to the reward earned by this episode.
EpisodeResult run_episode(agents::Agent& agent, const Task& task, const Configuration& cfg,
                          int channels, std::uint64_t start_tick, double& reward);

struct TestOutcome {
  UEstimate estimate;
  History history;
  std::uint64_t ticks_used = 0;
};

/// Called after every episode; returning false interrupts the test.
using EpisodeHook = std::function<bool(const TestSession&)>;

/// Runs episodes until the next one would exceed `budget` ticks (or the hook
/// stops it). The agent is reset first, so the outcome depends only on the
/// arguments.
TestOutcome run_anytime_test(agents::Agent& agent, const TaskClass& cls, const ConfigurationSpace& space,
                             std::uint64_t budget, std::uint64_t seed, SessionOptions options = {},
                             const EpisodeHook& hook = {});

}  // namespace uat::controller
