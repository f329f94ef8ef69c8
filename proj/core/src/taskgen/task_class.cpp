#include "uat/taskgen/task_class.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace uat::taskgen {

TaskClass::TaskClass(std::vector<Task> tasks, std::vector<double> band_edges,
                     std::vector<double> weights)
    : tasks_(std::move(tasks)), edges_(std::move(band_edges)), weights_(std::move(weights)) {
  if (edges_.size() < 2) throw std::invalid_argument("TaskClass: need at least two band edges");
  if (!std::is_sorted(edges_.begin(), edges_.end()) ||
      std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("TaskClass: band edges must be strictly increasing");
  }
  if (weights_.empty()) weights_.assign(tasks_.size(), 1.0);
  if (weights_.size() != tasks_.size()) {
    throw std::invalid_argument("TaskClass: one weight per task required");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("TaskClass: weights must be non-negative");
    total += w;
  }
  if (!tasks_.empty() && total <= 0.0) throw std::invalid_argument("TaskClass: zero total weight");
  raw_weights_ = weights_;
  for (double& w : weights_) w /= total;

  strata_.resize(edges_.size() - 1);
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!by_id_.emplace(tasks_[i].id, i).second) {
      throw std::invalid_argument("TaskClass: duplicate task id " + tasks_[i].id);
    }
    const double kt = tasks_[i].difficulty.value;
    if (kt < edges_.front() || kt > edges_.back()) {
      throw std::invalid_argument("TaskClass: task " + tasks_[i].id + " outside the band edges");
    }
    auto it = std::upper_bound(edges_.begin(), edges_.end(), kt);
    int s = static_cast<int>(it - edges_.begin()) - 1;
    s = std::min(s, static_cast<int>(strata_.size()) - 1);
    stratum_of_.push_back(s);
    strata_[static_cast<std::size_t>(s)].push_back(i);
  }
}

int TaskClass::alphabet() const {
  return tasks_.empty() ? refmachine::kDefaultAlphabet : tasks_.front().alphabet();
}

std::size_t TaskClass::index_of(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw std::out_of_range("unknown task id: " + id);
  return it->second;
}

DifficultyBand TaskClass::band(int s) const {
  const auto i = static_cast<std::size_t>(s);
  return {edges_.at(i), edges_.at(i + 1)};
}

EpisodeResult score_response(const Task& task, std::optional<Symbol> response, int config_id,
                             std::optional<std::uint64_t> latency) {
  EpisodeResult r;
  r.task_id = task.id;
  r.config_id = config_id;
  r.score = response && *response == task.answer ? 1.0 : 0.0;
  r.latency = response ? latency : std::nullopt;
  return r;
}

std::string to_string(AggregateMode mode) {
  return mode == AggregateMode::ProbabilityWeighted ? "weighted" : "stratified";
}

AggregateMode aggregate_mode_from_string(const std::string& text) {
  if (text == "weighted") return AggregateMode::ProbabilityWeighted;
  if (text == "stratified") return AggregateMode::Stratified;
  throw std::invalid_argument("unknown aggregate mode: " + text);
}

double aggregate(const std::vector<EpisodeResult>& results, const TaskClass& cls,
                 AggregateMode mode) {
  if (results.empty()) throw EmptyResults("aggregate: no results");
  // Per-task mean over repeated episodes, in bank order for a stable sum.
  std::vector<double> sum(cls.size(), 0.0);
  std::vector<int> count(cls.size(), 0);
  for (const auto& r : results) {
    const std::size_t i = cls.index_of(r.task_id);
    sum[i] += r.score;
    ++count[i];
  }
  if (mode == AggregateMode::ProbabilityWeighted) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (count[i] == 0) continue;
      num += sum[i] / count[i] * cls.weight(i);
      den += cls.weight(i);
    }
    if (den <= 0.0) {
      // Only zero-weight tasks were evaluated: fall back to the plain mean.
      double plain = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        if (count[i] == 0) continue;
        plain += sum[i] / count[i];
        ++n;
      }
      return plain / n;
    }
    return std::clamp(num / den, 0.0, 1.0);
  }
  std::vector<double> stratum_sum(static_cast<std::size_t>(cls.stratum_count()), 0.0);
  std::vector<int> stratum_n(stratum_sum.size(), 0);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (count[i] == 0) continue;
    const auto s = static_cast<std::size_t>(cls.stratum_of(i));
    stratum_sum[s] += sum[i];
    stratum_n[s] += count[i];
  }
  double total = 0.0;
  int strata = 0;
  for (std::size_t s = 0; s < stratum_sum.size(); ++s) {
    if (stratum_n[s] == 0) continue;
    total += stratum_sum[s] / stratum_n[s];
    ++strata;
  }
  return total / strata;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bank: bad " + what + ": " + std::string(s));
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bank: bad " + what + ": " + std::string(s));
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

constexpr const char* kMagic = "#uat-bank v1";

}  // namespace

void write_bank(std::ostream& out, const Bank& bank) {
  const auto& cls = bank.tasks;
  out << kMagic << "\talphabet=" << cls.alphabet() << "\tmax_len=" << bank.budget.max_len
      << "\tmax_steps=" << bank.budget.max_steps << "\tedges=";
  for (std::size_t i = 0; i < cls.band_edges().size(); ++i) {
    if (i) out << ',';
    out << format_double(cls.band_edges()[i]);
  }
  out << '\n';
  out << "id\tprogram\tprefix\tanswer\tlength\tsteps\texact\tdiscriminative\tweight\n";
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const Task& t = cls.task(i);
    out << t.id << '\t' << t.generator.text() << '\t' << t.prefix.compact() << '\t'
        << refmachine::symbol_char(t.answer) << '\t' << t.cost.length << '\t' << t.cost.steps
        << '\t' << (t.difficulty_exact ? 1 : 0) << '\t' << (t.discriminative ? 1 : 0) << '\t'
        << format_double(cls.raw_weights()[i]) << '\n';
  }
}

Bank read_bank(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kMagic)) {
    throw std::runtime_error("bank: missing header");
  }
  int alphabet = refmachine::kDefaultAlphabet;
  SearchBudget budget;
  std::vector<double> edges;
  for (const auto& field : split(line, '\t')) {
    auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "alphabet") alphabet = static_cast<int>(parse_uint(value, key));
    if (key == "max_len") budget.max_len = static_cast<int>(parse_uint(value, key));
    if (key == "max_steps") budget.max_steps = parse_uint(value, key);
    if (key == "edges") {
      for (const auto& e : split(value, ',')) edges.push_back(parse_double(e, "edge"));
    }
  }
  std::getline(in, line);  // column names
  std::vector<Task> tasks;
  std::vector<double> weights;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 9) {
      throw std::runtime_error("bank: line " + std::to_string(lineno) + ": expected 9 fields");
    }
    Task t;
    t.id = f[0];
    t.generator = Program::parse(f[1], alphabet);
    t.prefix = SymbolSequence::parse(f[2], alphabet);
    if (f[3].size() != 1) throw std::runtime_error("bank: bad answer on line " + std::to_string(lineno));
    t.answer = refmachine::symbol_from_char(f[3][0], alphabet);
    t.cost = LevinCost{static_cast<int>(parse_uint(f[4], "length")), parse_uint(f[5], "steps")};
    t.difficulty = t.cost.kt();
    t.difficulty_exact = f[6] == "1";
    t.discriminative = f[7] == "1";
    weights.push_back(parse_double(f[8], "weight"));
    tasks.push_back(std::move(t));
  }
  return Bank{TaskClass(std::move(tasks), std::move(edges), std::move(weights)), budget};
}

void save_bank(const std::string& path, const Bank& bank) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_bank(out, bank);
}

Bank load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_bank(in);
}

Bank generate_bank(const BankOptions& options) {
  const auto& edges = options.band_edges;
  if (edges.size() < 2) throw std::invalid_argument("generate_bank: need at least two band edges");
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());

  // Candidate k of stratum s uses its own seed, so the result does not depend
  // on scheduling. Candidates are consumed in k order, skipping duplicates.
  auto seed_for = [&](std::size_t s, std::uint64_t k) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(s), k};
    std::array<std::uint32_t, 2> v{};
    seq.generate(v.begin(), v.end());
    return (static_cast<std::uint64_t>(v[0]) << 32) | v[1];
  };

  std::vector<Task> tasks;
  std::set<std::string> seen;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const DifficultyBand band{edges[s], edges[s + 1]};
    int have = 0;
    int failures = 0;
    for (std::uint64_t next = 0; have < options.tasks_per_stratum;) {
      std::vector<std::future<std::optional<Task>>> batch;
      for (unsigned j = 0; j < threads; ++j) {
        const auto seed = seed_for(s, next++);
        batch.push_back(std::async(std::launch::async, [&, seed]() -> std::optional<Task> {
          try {
            return generate_task(band, seed, options.generation);
          } catch (const BandUnreachable&) {
            return std::nullopt;
          }
        }));
      }
      for (auto& f : batch) {
        auto task = f.get();
        if (!task) {
          if (++failures > 4 * options.tasks_per_stratum) {
            throw BandUnreachable("generate_bank: stratum " + std::to_string(s) + " unreachable");
          }
          continue;
        }
        if (have >= options.tasks_per_stratum || !seen.insert(task->full().compact()).second) continue;
        tasks.push_back(std::move(*task));
        ++have;
      }
    }
  }
  return Bank{TaskClass(std::move(tasks), edges), options.generation.budget};
}

}  // namespace uat::taskgen
