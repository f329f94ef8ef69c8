#include "uat/harness/spec.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uat/agents/agent.hpp"
#include "uat/interface/codec.hpp"

namespace uat::harness {

using nlohmann::json;

namespace {

std::string join(const std::vector<Diagnostic>& d) {
  std::string out = "invalid experiment spec:";
  for (const auto& x : d) out += "\n  " + x.field + ": " + x.message;
  return out;
}

class Reader {
 public:
  std::vector<Diagnostic> errors;

  void fail(const std::string& field, const std::string& message) { errors.push_back({field, message}); }

  template <class T>
  bool number(const json& j, const std::string& key, const std::string& path, T& out, T lo, T hi) {
    if (!j.contains(key)) return false;
    const auto& v = j.at(key);
    const std::string field = path + key;
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        fail(field, "expected a number");
        return false;
      }
      out = v.get<T>();
    } else {
      if (!v.is_number_integer()) {
        fail(field, "expected an integer");
        return false;
      }
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
        fail(field, "must be non-negative");
        return false;
      }
      out = v.get<T>();
    }
    if (out < lo || out > hi) {
      std::ostringstream m;
      m << "must lie in [" << lo << ", " << hi << "]";
      fail(field, m.str());
      return false;
    }
    return true;
  }

  bool string(const json& j, const std::string& key, const std::string& path, std::string& out) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_string()) {
      fail(path + key, "expected a string");
      return false;
    }
    out = j.at(key).get<std::string>();
    return true;
  }

  bool boolean(const json& j, const std::string& key, const std::string& path, bool& out) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_boolean()) {
      fail(path + key, "expected true or false");
      return false;
    }
    out = j.at(key).get<bool>();
    return true;
  }
};

constexpr auto kBig = std::numeric_limits<std::uint32_t>::max();

void read_time(Reader& r, const json& j, const std::string& path, interface::TimeConfig& t) {
  r.number(j, "exposition", path, t.exposition_ticks, 1u, kBig);
  r.number(j, "working", path, t.working_ticks, 1u, kBig);
}

}  // namespace

SpecInvalid::SpecInvalid(std::vector<Diagnostic> diagnostics)
    : std::invalid_argument(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ExperimentSpec parse_spec(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecInvalid("(document)", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecInvalid("(document)", "expected a JSON object");

  static const std::vector<std::string> known{
      "name", "bank", "channels", "configurations", "grid", "agents", "level", "configuration",
      "budget", "seeds", "seed", "replications", "aggregate", "episode_floor", "reset_per_episode",
      "discovery", "tick_ms", "agent_budget"};
  Reader r;
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) r.fail(k, "unknown field");
  }

  ExperimentSpec s;
  r.string(j, "name", "", s.name);
  r.number(j, "channels", "", s.channels, 1, 64);

  // Bank.
  if (!j.contains("bank")) {
    r.fail("bank", "required: a bank file path or generation parameters");
  } else if (j["bank"].is_string()) {
    std::filesystem::path p = j["bank"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    s.bank_path = p.string();
  } else if (j["bank"].is_object()) {
    const auto& b = j["bank"];
    taskgen::BankOptions o;
    if (b.contains("edges")) {
      if (!b["edges"].is_array() || b["edges"].size() < 2) {
        r.fail("bank.edges", "expected at least two increasing numbers");
      } else {
        o.band_edges.clear();
        for (const auto& e : b["edges"]) {
          if (!e.is_number()) {
            r.fail("bank.edges", "expected numbers");
            break;
          }
          o.band_edges.push_back(e.get<double>());
        }
        if (!std::is_sorted(o.band_edges.begin(), o.band_edges.end()) ||
            std::adjacent_find(o.band_edges.begin(), o.band_edges.end()) != o.band_edges.end()) {
          r.fail("bank.edges", "must be strictly increasing");
        }
      }
    }
    r.number(b, "tasks_per_stratum", "bank.", o.tasks_per_stratum, 1, 10000);
    r.number(b, "seed", "bank.", o.seed, std::uint64_t{0}, std::numeric_limits<std::uint64_t>::max());
    r.number(b, "max_len", "bank.", o.generation.budget.max_len, 1, 24);
    r.number(b, "max_steps", "bank.", o.generation.budget.max_steps, std::uint64_t{1}, std::uint64_t{1} << 24);
    r.number(b, "alphabet", "bank.", o.generation.alphabet, 2, refmachine::kMaxAlphabet);
    s.bank_generation = o;
  } else {
    r.fail("bank", "expected a path or an object");
  }

  // Configuration space: an explicit list or a grid.
  auto read_config = [&](const json& c, const std::string& path) {
    interface::Configuration cfg;
    if (!c.is_object()) {
      r.fail(path, "expected an object");
      return cfg;
    }
    read_time(r, c, path + ".", cfg.time);
    r.string(c, "codec", path + ".", cfg.resolution.codec);
    r.number(c, "channel", path + ".", cfg.resolution.channel, 0, s.channels - 1);
    r.number(c, "alphabet", path + ".", cfg.resolution.alphabet, 2, refmachine::kMaxAlphabet);
    if (!interface::codec_registered(cfg.resolution.codec)) {
      r.fail(path + ".codec", "unknown codec '" + cfg.resolution.codec + "'");
    }
    return cfg;
  };
  if (j.contains("configurations")) {
    if (!j["configurations"].is_array() || j["configurations"].empty()) {
      r.fail("configurations", "expected a non-empty array");
    } else {
      for (std::size_t i = 0; i < j["configurations"].size(); ++i) {
        s.configurations.push_back(read_config(j["configurations"][i], "configurations[" + std::to_string(i) + "]"));
      }
    }
    if (j.contains("grid")) r.fail("grid", "give either configurations or grid, not both");
  } else if (j.contains("grid")) {
    const auto& g = j["grid"];
    std::vector<interface::TimeConfig> times;
    std::vector<interface::ResolutionConfig> res;
    if (!g.is_object() || !g.contains("times") || !g["times"].is_array() || g["times"].empty()) {
      r.fail("grid.times", "expected a non-empty array of {exposition, working}");
    } else {
      for (std::size_t i = 0; i < g["times"].size(); ++i) {
        interface::TimeConfig t;
        read_time(r, g["times"][i], "grid.times[" + std::to_string(i) + "].", t);
        times.push_back(t);
      }
    }
    std::vector<std::string> codecs{"raw"};
    std::vector<int> channels;
    for (int c = 0; c < s.channels; ++c) channels.push_back(c);
    if (g.is_object() && g.contains("codecs")) {
      codecs.clear();
      for (const auto& c : g["codecs"]) {
        if (!c.is_string() || !interface::codec_registered(c.get<std::string>())) {
          r.fail("grid.codecs", "unknown codec " + c.dump());
        } else {
          codecs.push_back(c.get<std::string>());
        }
      }
    }
    if (g.is_object() && g.contains("channels")) {
      channels.clear();
      for (const auto& c : g["channels"]) {
        if (!c.is_number_integer() || c.get<int>() < 0 || c.get<int>() >= s.channels) {
          r.fail("grid.channels", "channel out of range: " + c.dump());
        } else {
          channels.push_back(c.get<int>());
        }
      }
    }
    int alphabet = refmachine::kDefaultAlphabet;
    if (g.is_object()) r.number(g, "alphabet", "grid.", alphabet, 2, refmachine::kMaxAlphabet);
    for (const auto& codec : codecs) {
      for (int c : channels) res.push_back({alphabet, codec, c});
    }
    for (const auto& t : times) {
      for (const auto& rc : res) s.configurations.push_back({0, t, rc});
    }
  } else {
    r.fail("configurations", "required: a configuration list or a grid");
  }
  for (std::size_t i = 0; i < s.configurations.size(); ++i) s.configurations[i].id = static_cast<int>(i);

  // Agents.
  if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty()) {
    r.fail("agents", "expected a non-empty array of agent specs");
  } else {
    for (std::size_t i = 0; i < j["agents"].size(); ++i) {
      const auto& a = j["agents"][i];
      const std::string field = "agents[" + std::to_string(i) + "]";
      if (!a.is_string()) {
        r.fail(field, "expected a string");
        continue;
      }
      const auto text = a.get<std::string>();
      if (text != "human") {
        try {
          agents::make_agent(text, 0);
        } catch (const std::exception& e) {
          r.fail(field, e.what());
        }
      }
      s.agents.push_back(text);
    }
  }

  r.number(j, "level", "", s.level, 1, 4);
  if (r.number(j, "configuration", "", s.configuration, 0, std::numeric_limits<int>::max()) &&
      !s.configurations.empty() && s.configuration >= static_cast<int>(s.configurations.size())) {
    r.fail("configuration", "no configuration with id " + std::to_string(s.configuration));
  }
  r.number(j, "budget", "", s.budget, std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max());

  if (j.contains("seeds")) {
    if (!j["seeds"].is_array() || j["seeds"].empty()) {
      r.fail("seeds", "expected a non-empty array of integers");
    } else {
      s.seeds.clear();
      for (const auto& v : j["seeds"]) {
        if (!v.is_number_unsigned()) {
          r.fail("seeds", "expected non-negative integers");
          break;
        }
        s.seeds.push_back(v.get<std::uint64_t>());
      }
    }
    if (j.contains("seed") || j.contains("replications")) r.fail("seeds", "give seeds or seed/replications, not both");
  } else {
    std::uint64_t seed = 1;
    int reps = 1;
    r.number(j, "seed", "", seed, std::uint64_t{0}, std::numeric_limits<std::uint64_t>::max());
    r.number(j, "replications", "", reps, 1, 1000000);
    s.seeds.clear();
    for (int i = 0; i < reps; ++i) s.seeds.push_back(seed + static_cast<std::uint64_t>(i));
  }

  std::string mode;
  if (r.string(j, "aggregate", "", mode)) {
    try {
      s.estimate.mode = taskgen::aggregate_mode_from_string(mode);
    } catch (const std::exception&) {
      r.fail("aggregate", "expected \"weighted\" or \"stratified\"");
    }
  }
  r.number(j, "episode_floor", "", s.estimate.episode_floor, std::size_t{0}, std::size_t{1000000});
  r.boolean(j, "reset_per_episode", "", s.reset_per_episode);
  r.number(j, "tick_ms", "", s.tick_ms, 1u, 3600000u);
  if (j.contains("agent_budget")) {
    const auto& b = j["agent_budget"];
    r.number(b, "max_len", "agent_budget.", s.agent_budget.max_len, 1, 24);
    r.number(b, "max_steps", "agent_budget.", s.agent_budget.max_steps, std::uint64_t{1}, std::uint64_t{1} << 24);
  }

  if (j.contains("discovery")) {
    const auto& d = j["discovery"];
    if (!d.is_object()) {
      r.fail("discovery", "expected an object");
    } else {
      r.number(d, "repeats", "discovery.", s.discovery.repeats, 1, 10000);
      r.number(d, "blanks", "discovery.", s.discovery.blanks, 1, 10000);
      r.number(d, "threshold", "discovery.", s.discovery.threshold, 0.0, 1.0);
      read_time(r, d, "discovery.", s.discovery.time);
      r.number(d, "windows", "discovery.", s.discovery.windows, 2, 1000000);
      if (d.contains("signals")) {
        s.discovery.signals.clear();
        if (!d["signals"].is_array()) {
          r.fail("discovery.signals", "expected an array of integers");
        } else {
          for (const auto& v : d["signals"]) {
            if (!v.is_number_integer()) {
              r.fail("discovery.signals", "expected integers");
              break;
            }
            s.discovery.signals.push_back(v.get<int>());
          }
        }
        if (s.discovery.signals.size() < 2 || s.discovery.signals.size() > 3) {
          r.fail("discovery.signals", "give two or three candidate signals");
        }
      }
    }
  }

  if (!r.errors.empty()) throw SpecInvalid(r.errors);
  try {
    (void)s.space();
  } catch (const std::exception& e) {
    throw SpecInvalid("configurations", e.what());
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecInvalid("(file)", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string to_json(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  if (s.bank_path) {
    j["bank"] = *s.bank_path;
  } else if (s.bank_generation) {
    const auto& o = *s.bank_generation;
    j["bank"] = {{"edges", o.band_edges},
                 {"tasks_per_stratum", o.tasks_per_stratum},
                 {"seed", o.seed},
                 {"max_len", o.generation.budget.max_len},
                 {"max_steps", o.generation.budget.max_steps},
                 {"alphabet", o.generation.alphabet}};
  }
  j["channels"] = s.channels;
  j["configurations"] = json::array();
  for (const auto& c : s.configurations) {
    j["configurations"].push_back({{"exposition", c.time.exposition_ticks},
                                   {"working", c.time.working_ticks},
                                   {"codec", c.resolution.codec},
                                   {"channel", c.resolution.channel},
                                   {"alphabet", c.resolution.alphabet}});
  }
  j["agents"] = s.agents;
  j["level"] = s.level;
  j["configuration"] = s.configuration;
  j["budget"] = s.budget;
  j["seeds"] = s.seeds;
  j["aggregate"] = taskgen::to_string(s.estimate.mode);
  j["episode_floor"] = s.estimate.episode_floor;
  j["reset_per_episode"] = s.reset_per_episode;
  j["tick_ms"] = s.tick_ms;
  j["agent_budget"] = {{"max_len", s.agent_budget.max_len}, {"max_steps", s.agent_budget.max_steps}};
  j["discovery"] = {{"repeats", s.discovery.repeats},
                    {"blanks", s.discovery.blanks},
                    {"threshold", s.discovery.threshold},
                    {"exposition", s.discovery.time.exposition_ticks},
                    {"working", s.discovery.time.working_ticks},
                    {"signals", s.discovery.signals},
                    {"windows", s.discovery.windows}};
  return j.dump();
}

taskgen::Bank resolve_bank(const ExperimentSpec& spec) {
  if (spec.bank_path) return taskgen::load_bank(*spec.bank_path);
  if (spec.bank_generation) return taskgen::generate_bank(*spec.bank_generation);
  throw SpecInvalid("bank", "no bank given");
}

}  // namespace uat::harness
