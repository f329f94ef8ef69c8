#include "uat/harness/record.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json_codec.hpp"

namespace uat::harness {

using detail::json;

std::string to_json_line(const SessionRecord& r) {
  json history = json::array();
  for (const auto& e : r.history) history.push_back(detail::to_json(e));
  json j{{"type", "session"},
         {"id", r.id},
         {"agent", r.agent},
         {"level", r.level},
         {"seed", r.seed},
         {"spec", json::parse(r.spec.empty() ? "{}" : r.spec)},
         {"configurations", r.configurations},
         {"aggregate", taskgen::to_string(r.estimate_options.mode)},
         {"episode_floor", r.estimate_options.episode_floor},
         {"history", history},
         {"reward_discovery", r.reward_discovery ? detail::to_json(*r.reward_discovery) : json(nullptr)},
         {"channel_discovery", r.channel_discovery ? detail::to_json(*r.channel_discovery) : json(nullptr)},
         {"estimate", detail::to_json(r.estimate)},
         {"halted", r.halted ? json(*r.halted) : json(nullptr)},
         {"started", r.started},
         {"finished", r.finished}};
  return j.dump();
}

SessionRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  if (j.at("type") != "session") throw std::runtime_error("not a session record");
  SessionRecord r;
  r.id = j.at("id").get<std::string>();
  r.agent = j.at("agent").get<std::string>();
  r.level = j.at("level").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.spec = j.at("spec").dump();
  r.configurations = j.at("configurations").get<std::vector<std::string>>();
  r.estimate_options.mode = taskgen::aggregate_mode_from_string(j.at("aggregate").get<std::string>());
  r.estimate_options.episode_floor = j.at("episode_floor").get<std::size_t>();
  for (const auto& e : j.at("history")) r.history.push_back(detail::entry_from_json(e));
  if (!j.at("reward_discovery").is_null()) r.reward_discovery = detail::report_from_json(j.at("reward_discovery"));
  if (!j.at("channel_discovery").is_null()) r.channel_discovery = detail::report_from_json(j.at("channel_discovery"));
  r.estimate = detail::estimate_from_json(j.at("estimate"));
  if (!j.at("halted").is_null()) r.halted = j.at("halted").get<std::string>();
  r.started = j.at("started").get<std::string>();
  r.finished = j.at("finished").get<std::string>();
  return r;
}

void write_records(std::ostream& out, const std::vector<SessionRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<SessionRecord> read_records(std::istream& in) {
  std::vector<SessionRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("record line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void save_records(const std::string& path, const std::vector<SessionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_records(out, records);
}

std::vector<SessionRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_records(in);
}

std::string history_to_jsonl(const controller::History& h) {
  std::string out;
  for (const auto& e : h) out += detail::to_json(e).dump() + "\n";
  return out;
}

controller::History history_from_jsonl(std::istream& in) {
  controller::History h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    h.push_back(detail::entry_from_json(json::parse(line)));
  }
  return h;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace uat::harness
