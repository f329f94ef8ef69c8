#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uat/controller/history.hpp"
#include "uat/discovery/discovery.hpp"

namespace uat::harness {

/// Everything one evaluation session produced. Serialized as a single JSON
/// line tagged "type":"session"; probe records inside carry "type":"probe".
struct SessionRecord {
  std::string id;
  std::string agent;
  int level = 0;
  std::uint64_t seed = 0;
  /// Canonical JSON of the experiment spec.
  std::string spec;
  /// Labels of the configuration space the ids in the history refer to.
  std::vector<std::string> configurations;
  controller::EstimateOptions estimate_options;
  controller::History history;
  std::optional<discovery::DiscoveryReport> reward_discovery;
  std::optional<discovery::DiscoveryReport> channel_discovery;
  controller::UEstimate estimate;
  /// Why the session stopped before testing, if it did.
  std::optional<std::string> halted;
  std::string started;
  std::string finished;
};

std::string to_json_line(const SessionRecord& r);
SessionRecord record_from_json(const std::string& line);

void write_records(std::ostream& out, const std::vector<SessionRecord>& records);
/// Blank lines are skipped. Throws std::runtime_error naming the bad line.
std::vector<SessionRecord> read_records(std::istream& in);
void save_records(const std::string& path, const std::vector<SessionRecord>& records);
std::vector<SessionRecord> load_records(const std::string& path);

/// History entries as JSON lines, one per episode.
std::string history_to_jsonl(const controller::History& h);
controller::History history_from_jsonl(std::istream& in);

/// Current UTC time, ISO 8601.
std::string utc_now();

}  // namespace uat::harness
