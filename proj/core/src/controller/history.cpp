#include "uat/controller/history.hpp"

#include <algorithm>

namespace uat::controller {

bool HistoryEntry::operator==(const HistoryEntry& o) const {
  return start_tick == o.start_tick && tau == o.tau && task_id == o.task_id &&
         config_id == o.config_id && stratum == o.stratum && weight == o.weight &&
         result.task_id == o.result.task_id && result.score == o.result.score &&
         result.latency == o.result.latency && result.config_id == o.result.config_id;
}

bool operator==(const ConfigScore& a, const ConfigScore& b) {
  return a.aggregate == b.aggregate && a.episodes == b.episodes;
}

bool UEstimate::operator==(const UEstimate& o) const {
  return per_config == o.per_config && best_config == o.best_config && value == o.value &&
         episodes == o.episodes && reach == o.reach;
}

namespace {

struct TaskTally {
  double sum = 0.0;
  int count = 0;
  double weight = 0.0;
  int stratum = 0;
};

// Mirrors taskgen::aggregate, but reads weights and strata from the entries.
double fold_aggregate(const std::map<std::string, TaskTally>& tasks, AggregateMode mode) {
  if (mode == AggregateMode::ProbabilityWeighted) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& [id, t] : tasks) {
      num += t.sum / t.count * t.weight;
      den += t.weight;
    }
    if (den <= 0.0) {
      double plain = 0.0;
      for (const auto& [id, t] : tasks) plain += t.sum / t.count;
      return plain / static_cast<double>(tasks.size());
    }
    return std::clamp(num / den, 0.0, 1.0);
  }
  std::map<int, std::pair<double, int>> strata;
  for (const auto& [id, t] : tasks) {
    auto& s = strata[t.stratum];
    s.first += t.sum;
    s.second += t.count;
  }
  double total = 0.0;
  for (const auto& [s, v] : strata) total += v.first / v.second;
  return total / static_cast<double>(strata.size());
}

}  // namespace

UEstimate u_estimate(const History& h, const EstimateOptions& options) {
  UEstimate u;
  u.episodes = h.size();
  std::map<int, std::map<std::string, TaskTally>> by_config;
  for (const auto& e : h) {
    auto& t = by_config[e.config_id][e.task_id];
    t.sum += e.result.score;
    ++t.count;
    t.weight = e.weight;
    t.stratum = e.stratum;
  }
  for (const auto& [cfg, tasks] : by_config) {
    ConfigScore cs;
    cs.aggregate = fold_aggregate(tasks, options.mode);
    for (const auto& [id, t] : tasks) cs.episodes += static_cast<std::size_t>(t.count);
    u.per_config.emplace(cfg, cs);
  }
  for (const auto& [cfg, cs] : u.per_config) {
    if (cs.episodes < options.episode_floor) continue;
    // Map order is id order, so strict > keeps the lowest id on ties.
    if (!u.best_config || cs.aggregate > u.value) {
      u.best_config = cfg;
      u.value = cs.aggregate;
    }
  }
  if (u.best_config) {
    for (const auto& [s, mean] : stratum_means(h, *u.best_config)) {
      if (mean >= 0.5) u.reach = s;
    }
  }
  return u;
}

std::map<int, double> stratum_means(const History& h, int config_id) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& e : h) {
    if (e.config_id != config_id) continue;
    auto& a = acc[e.stratum];
    a.first += e.result.score;
    ++a.second;
  }
  std::map<int, double> out;
  for (const auto& [s, a] : acc) out.emplace(s, a.first / a.second);
  return out;
}

}  // namespace uat::controller
