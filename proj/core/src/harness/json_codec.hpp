#pragma once

// JSON forms of the domain types, shared by the record store and the service.

#include <json.hpp>

#include "uat/controller/history.hpp"
#include "uat/discovery/discovery.hpp"

namespace uat::harness::detail {

using nlohmann::json;

inline json to_json(const controller::HistoryEntry& e) {
  json j{{"start_tick", e.start_tick}, {"tau", e.tau},       {"task", e.task_id},
         {"config", e.config_id},     {"stratum", e.stratum}, {"weight", e.weight},
         {"score", e.result.score}};
  j["latency"] = e.result.latency ? json(*e.result.latency) : json(nullptr);
  return j;
}

inline controller::HistoryEntry entry_from_json(const json& j) {
  controller::HistoryEntry e;
  e.start_tick = j.at("start_tick").get<std::uint64_t>();
  e.tau = j.at("tau").get<std::uint64_t>();
  e.task_id = j.at("task").get<std::string>();
  e.config_id = j.at("config").get<int>();
  e.stratum = j.at("stratum").get<int>();
  e.weight = j.at("weight").get<double>();
  e.result.task_id = e.task_id;
  e.result.config_id = e.config_id;
  e.result.score = j.at("score").get<double>();
  if (!j.at("latency").is_null()) e.result.latency = j.at("latency").get<std::uint64_t>();
  return e;
}

inline json to_json(const controller::UEstimate& u) {
  json per = json::array();
  for (const auto& [id, cs] : u.per_config) {
    per.push_back({{"config", id}, {"aggregate", cs.aggregate}, {"episodes", cs.episodes}});
  }
  return {{"value", u.value},
          {"best_config", u.best_config ? json(*u.best_config) : json(nullptr)},
          {"reach", u.reach ? json(*u.reach) : json(nullptr)},
          {"episodes", u.episodes},
          {"evaluated", u.evaluated()},
          {"per_config", per}};
}

inline controller::UEstimate estimate_from_json(const json& j) {
  controller::UEstimate u;
  u.value = j.at("value").get<double>();
  if (!j.at("best_config").is_null()) u.best_config = j.at("best_config").get<int>();
  if (!j.at("reach").is_null()) u.reach = j.at("reach").get<int>();
  u.episodes = j.at("episodes").get<std::size_t>();
  for (const auto& p : j.at("per_config")) {
    u.per_config[p.at("config").get<int>()] = {p.at("aggregate").get<double>(), p.at("episodes").get<std::size_t>()};
  }
  return u;
}

inline json to_json(const discovery::ProbeRecord& p) {
  return {{"type", "probe"},
          {"tick", p.tick},
          {"channel", p.channel},
          {"stimulus", p.stimulus},
          {"action", p.action ? json(std::string(1, refmachine::symbol_char(*p.action))) : json(nullptr)},
          {"reward", p.reward ? json(*p.reward) : json(nullptr)}};
}

inline discovery::ProbeRecord probe_from_json(const json& j) {
  discovery::ProbeRecord p;
  p.tick = j.at("tick").get<std::uint64_t>();
  p.channel = j.at("channel").get<int>();
  p.stimulus = j.at("stimulus").get<std::string>();
  if (!j.at("action").is_null()) {
    p.action = static_cast<refmachine::Symbol>(j.at("action").get<std::string>().at(0) - 'a');
  }
  if (!j.at("reward").is_null()) p.reward = j.at("reward").get<double>();
  return p;
}

template <class K, class V>
json map_to_json(const std::map<K, V>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

template <class V>
std::map<int, V> map_from_json(const json& j) {
  std::map<int, V> out;
  for (const auto& [k, v] : j.items()) out[std::stoi(k)] = v.template get<V>();
  return out;
}

inline json to_json(const discovery::DiscoveryReport& r) {
  json probes = json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  return {{"posterior", map_to_json(r.posterior)},
          {"scores", map_to_json(r.scores)},
          {"best_codec", map_to_json(r.best_codec)},
          {"channel", r.channel ? json(*r.channel) : json(nullptr)},
          {"signal_mi", map_to_json(r.signal_mi)},
          {"reward_signal", r.reward_signal ? json(*r.reward_signal) : json(nullptr)},
          {"threshold", r.threshold},
          {"confidence", r.confidence},
          {"conclusive", r.conclusive},
          {"probes", probes}};
}

inline discovery::DiscoveryReport report_from_json(const json& j) {
  discovery::DiscoveryReport r;
  r.posterior = map_from_json<double>(j.at("posterior"));
  r.scores = map_from_json<double>(j.at("scores"));
  r.best_codec = map_from_json<std::string>(j.at("best_codec"));
  if (!j.at("channel").is_null()) r.channel = j.at("channel").get<int>();
  r.signal_mi = map_from_json<double>(j.at("signal_mi"));
  if (!j.at("reward_signal").is_null()) r.reward_signal = j.at("reward_signal").get<int>();
  r.threshold = j.at("threshold").get<double>();
  r.confidence = j.at("confidence").get<double>();
  r.conclusive = j.at("conclusive").get<bool>();
  for (const auto& p : j.at("probes")) r.probes.push_back(probe_from_json(p));
  return r;
}

}  // namespace uat::harness::detail
