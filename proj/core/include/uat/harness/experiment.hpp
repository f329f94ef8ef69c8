#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uat/agents/agent.hpp"
#include "uat/harness/record.hpp"
#include "uat/harness/spec.hpp"

namespace uat::harness {

/// Runs one agent for one seed at the spec's level. Discovery that comes out
/// inconclusive halts the session before testing; its estimate is then
/// unevaluated.
SessionRecord run_session(const ExperimentSpec& spec, const taskgen::Bank& bank, std::size_t agent_index,
                          std::uint64_t seed,
                          std::shared_ptr<agents::PredictionCache> cache = nullptr);

/// Same, with a caller-built agent (used for agents outside make_agent).
SessionRecord run_session(const ExperimentSpec& spec, const taskgen::Bank& bank, agents::Agent& agent,
                          const std::string& agent_label, std::uint64_t seed);

struct SummaryRow {
  std::string agent;
  int level = 0;
  std::size_t runs = 0;
  std::size_t unevaluated = 0;
  /// Mean U over the runs.
  double u = 0.0;
  /// Most frequent best configuration label ("-" when none).
  std::string best;
  /// Most frequent reach stratum (-1 when none).
  int reach = -1;
};

struct ExperimentResult {
  std::vector<SessionRecord> records;
  std::vector<SummaryRow> summary;
};

/// Every agent for every seed. Sessions run on up to `threads` workers
/// (0 = hardware concurrency); records come back in (agent, seed) order.
ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

/// Rows grouped by (agent, level) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<SessionRecord>& records);

/// Tab-separated: agent level runs unevaluated U best reach. Header always present.
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Per-configuration score curves: the running aggregate of each
/// configuration after every episode. Tab-separated, header always present.
void write_curves(std::ostream& out, const std::vector<SessionRecord>& records);

struct AuditFinding {
  std::string session;
  std::string problem;
};

/// Recomputes every stored estimate from its history; empty when all match bit for bit.
std::vector<AuditFinding> audit(const std::vector<SessionRecord>& records);

}  // namespace uat::harness
