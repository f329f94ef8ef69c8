#include "uat/harness/service.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "json_codec.hpp"
#include "uat/interface/codec.hpp"

namespace uat::harness {

using detail::json;
namespace fs = std::filesystem;

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

struct SessionService::Session {
  std::string id;
  std::uint64_t seed = 0;
  std::unique_ptr<controller::TestSession> test;
  struct Outstanding {
    std::uint64_t item = 0;
    controller::Selection selection;
    std::int64_t issued_ms = 0;
  };
  std::optional<Outstanding> outstanding;
  std::map<std::uint64_t, AnswerResult> scored;
  std::uint64_t items = 0;
  std::string log_path;
};

SessionService::SessionService(ExperimentSpec spec, taskgen::Bank bank, ServiceOptions options)
    : spec_(std::move(spec)), bank_(std::move(bank)), space_(spec_.space()), options_(std::move(options)) {
  if (!options_.clock) options_.clock = system_clock_ms();
  if (options_.store_dir.empty()) return;
  fs::create_directories(options_.store_dir);
  std::vector<fs::path> logs;
  for (const auto& e : fs::directory_iterator(options_.store_dir)) {
    if (e.path().extension() == ".jsonl") logs.push_back(e.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& p : logs) replay(p.string());
}

SessionService::~SessionService() = default;

SessionService::Session& SessionService::open(const std::string& id, std::uint64_t seed) {
  auto s = std::make_unique<Session>();
  s->id = id;
  s->seed = seed;
  controller::SessionOptions so;
  so.policy.seed = seed;
  so.policy.estimate = spec_.estimate;
  s->test = std::make_unique<controller::TestSession>(bank_.tasks, space_, so);
  if (!options_.store_dir.empty()) s->log_path = (fs::path(options_.store_dir) / (id + ".jsonl")).string();
  auto& ref = *s;
  sessions_[id] = std::move(s);
  return ref;
}

void SessionService::append(Session& s, const std::string& line) {
  if (s.log_path.empty()) return;
  std::ofstream out(s.log_path, std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + s.log_path);
}

void SessionService::replay(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  Session* s = nullptr;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const json j = json::parse(line);
    const auto type = j.at("type").get<std::string>();
    const std::string where = path + ":" + std::to_string(n);
    if (type == "create") {
      const auto id = j.at("id").get<std::string>();
      s = &open(id, j.at("seed").get<std::uint64_t>());
      if (id.size() > 1) next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(id.substr(1)) + 1);
      continue;
    }
    if (!s) throw std::runtime_error(where + ": event before create");
    if (type == "issue") {
      const auto sel = s->test->next();
      if (j.at("task").get<std::string>() != s->test->task(sel).id || j.at("config").get<int>() != sel.config_id) {
        throw std::runtime_error(where + ": log disagrees with the selection policy");
      }
      s->outstanding = Session::Outstanding{j.at("item").get<std::uint64_t>(), sel, j.at("issued_ms").get<std::int64_t>()};
      s->items = std::max(s->items, s->outstanding->item);
    } else if (type == "result") {
      if (!s->outstanding || s->outstanding->item != j.at("item").get<std::uint64_t>()) {
        throw std::runtime_error(where + ": result for an item that was not outstanding");
      }
      const auto entry = detail::entry_from_json(j.at("entry"));
      s->test->record(s->outstanding->selection, entry.result);
      AnswerResult r;
      r.accepted = true;
      r.expired = j.at("expired").get<bool>();
      r.score = entry.result.score;
      r.reason = j.value("reason", "");
      s->scored[s->outstanding->item] = r;
      s->outstanding.reset();
    } else {
      throw std::runtime_error(where + ": unknown event " + type);
    }
  }
}

SessionService::Session& SessionService::find(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session " + id);
  return *it->second;
}

std::string SessionService::create(std::optional<std::uint64_t> seed) {
  std::lock_guard lock(mu_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(next_id_));
  const std::string id = buf;
  const std::uint64_t sd = seed.value_or(next_id_);
  ++next_id_;
  auto& s = open(id, sd);
  append(s, json{{"type", "create"}, {"id", id}, {"seed", sd}}.dump());
  return id;
}

void SessionService::expire_if_late(Session& s, std::int64_t now) {
  if (!s.outstanding) return;
  const auto& cfg = s.test->config(s.outstanding->selection);
  const std::int64_t deadline =
      s.outstanding->issued_ms + static_cast<std::int64_t>(cfg.time.episode_ticks() * spec_.tick_ms);
  if (now < deadline) return;
  const auto& task = s.test->task(s.outstanding->selection);
  const auto result = taskgen::score_response(task, std::nullopt, cfg.id);
  controller::HistoryEntry preview;
  preview.start_tick = s.test->clock();
  preview.tau = s.outstanding->selection.tau;
  preview.task_id = task.id;
  preview.config_id = cfg.id;
  preview.stratum = s.outstanding->selection.stratum;
  preview.weight = bank_.tasks.weight(s.outstanding->selection.task_index);
  preview.result = result;
  append(s, json{{"type", "result"}, {"item", s.outstanding->item}, {"expired", true},
                 {"reason", "timed out"}, {"entry", detail::to_json(preview)}}.dump());
  s.test->record(s.outstanding->selection, result);
  s.scored[s.outstanding->item] = AnswerResult{true, true, false, 0.0, "timed out"};
  s.outstanding.reset();
}

namespace {

ItemView view_of(const controller::TestSession& t, const controller::Selection& sel, std::uint64_t item,
                 std::int64_t issued, std::uint32_t tick_ms) {
  const auto& cfg = t.config(sel);
  ItemView v;
  v.item = item;
  v.rendering = interface::make_codec(cfg.resolution.codec, cfg.resolution.alphabet)->render(t.task(sel).prefix);
  v.codec = cfg.resolution.codec;
  v.channel = cfg.resolution.channel;
  v.config = cfg.label();
  v.stratum = sel.stratum;
  v.issued_ms = issued;
  v.working_ms = issued + static_cast<std::int64_t>(std::uint64_t{cfg.time.exposition_ticks} * tick_ms);
  v.deadline_ms = issued + static_cast<std::int64_t>(cfg.time.episode_ticks() * tick_ms);
  return v;
}

}  // namespace

NextResult SessionService::next(const std::string& id) {
  std::lock_guard lock(mu_);
  auto& s = find(id);
  const auto now = options_.clock();
  expire_if_late(s, now);
  if (s.outstanding) {
    return {false, view_of(*s.test, s.outstanding->selection, s.outstanding->item, s.outstanding->issued_ms,
                           spec_.tick_ms)};
  }
  const auto sel = s.test->next();
  if (s.test->clock() + sel.tau > spec_.budget) return {true, std::nullopt};
  const std::uint64_t item = s.items + 1;
  append(s, json{{"type", "issue"}, {"item", item}, {"issued_ms", now}, {"task", s.test->task(sel).id},
                 {"config", sel.config_id}, {"stratum", sel.stratum}}.dump());
  s.items = item;
  s.outstanding = Session::Outstanding{item, sel, now};
  return {false, view_of(*s.test, sel, item, now, spec_.tick_ms)};
}

AnswerResult SessionService::answer(const std::string& id, std::uint64_t item,
                                    const std::optional<std::string>& text) {
  std::lock_guard lock(mu_);
  auto& s = find(id);
  if (auto it = s.scored.find(item); it != s.scored.end()) {
    AnswerResult r = it->second;
    r.duplicate = true;
    return r;
  }
  if (!s.outstanding || s.outstanding->item != item) throw UnknownItem("item " + std::to_string(item) + " is not outstanding");
  const auto now = options_.clock();
  const auto view = view_of(*s.test, s.outstanding->selection, item, s.outstanding->issued_ms, spec_.tick_ms);
  if (now >= view.deadline_ms) {
    expire_if_late(s, now);
    AnswerResult r = s.scored.at(item);
    r.reason = "deadline expired";
    return r;
  }
  if (now < view.working_ms) return AnswerResult{false, false, false, 0.0, "exposition window still open"};

  const auto& cfg = s.test->config(s.outstanding->selection);
  const auto& task = s.test->task(s.outstanding->selection);
  std::optional<refmachine::Symbol> response;
  if (text) {
    const auto parsed = interface::make_codec(cfg.resolution.codec, cfg.resolution.alphabet)->parse(*text);
    if (parsed.size() != 1) throw std::invalid_argument("an answer is exactly one symbol");
    response = parsed[0];
  }
  const auto latency = static_cast<std::uint64_t>((now - view.working_ms) / spec_.tick_ms);
  const auto result = taskgen::score_response(task, response, cfg.id, response ? std::optional(latency) : std::nullopt);
  controller::HistoryEntry preview;
  preview.start_tick = s.test->clock();
  preview.tau = s.outstanding->selection.tau;
  preview.task_id = task.id;
  preview.config_id = cfg.id;
  preview.stratum = s.outstanding->selection.stratum;
  preview.weight = bank_.tasks.weight(s.outstanding->selection.task_index);
  preview.result = result;
  append(s, json{{"type", "result"}, {"item", item}, {"expired", false}, {"entry", detail::to_json(preview)}}.dump());
  s.test->record(s.outstanding->selection, result);
  AnswerResult r{true, false, false, result.score, ""};
  s.scored[item] = r;
  s.outstanding.reset();
  return r;
}

Progress SessionService::progress(const std::string& id) {
  std::lock_guard lock(mu_);
  auto& s = find(id);
  expire_if_late(s, options_.clock());
  Progress p;
  p.items_done = s.test->history().size();
  p.ticks_used = s.test->clock();
  p.budget = spec_.budget;
  const auto sel = s.outstanding ? s.outstanding->selection : s.test->next();
  p.stratum = sel.stratum;
  p.done = !s.outstanding && s.test->clock() + sel.tau > spec_.budget;
  p.estimate = s.test->estimate();
  return p;
}

std::vector<std::string> SessionService::sessions() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

controller::History SessionService::history(const std::string& id) {
  std::lock_guard lock(mu_);
  return find(id).test->history();
}

// HTTP

struct HttpServer::Impl {
  SessionService* service;
  httplib::Server server;
  std::thread thread;
};

namespace {

json item_json(const ItemView& v) {
  return {{"item", v.item},
          {"rendering", v.rendering},
          {"codec", v.codec},
          {"channel", v.channel},
          {"config", v.config},
          {"stratum", v.stratum},
          {"issued_ms", v.issued_ms},
          {"working_ms", v.working_ms},
          {"deadline_ms", v.deadline_ms},
          {"exposition_window_ms", v.working_ms - v.issued_ms},
          {"working_window_ms", v.deadline_ms - v.working_ms}};
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    res.set_content(f().dump(), "application/json");
  } catch (const SessionNotFound& e) {
    res.status = 404;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const UnknownItem& e) {
    res.status = 409;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const std::exception& e) {
    res.status = 400;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  }
}

}  // namespace

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>()) {
  impl_->service = &service;
  auto& srv = impl_->server;
  auto* svc = impl_->service;
  srv.Post("/sessions", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::uint64_t> seed;
      if (!req.body.empty()) {
        const auto j = json::parse(req.body);
        if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
      }
      return json{{"session", svc->create(seed)}};
    });
  });
  srv.Get(R"(/sessions/([^/]+)/next)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto r = svc->next(req.matches[1]);
      return json{{"done", r.done}, {"item", r.item ? item_json(*r.item) : json(nullptr)}};
    });
  });
  srv.Post(R"(/sessions/([^/]+)/answer)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto j = json::parse(req.body);
      std::optional<std::string> answer;
      if (j.contains("answer") && !j.at("answer").is_null()) answer = j.at("answer").get<std::string>();
      const auto r = svc->answer(req.matches[1], j.at("item").get<std::uint64_t>(), answer);
      return json{{"accepted", r.accepted}, {"expired", r.expired}, {"duplicate", r.duplicate},
                  {"score", r.score}, {"reason", r.reason}};
    });
  });
  srv.Get(R"(/sessions/([^/]+)/progress)", [svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto p = svc->progress(req.matches[1]);
      return json{{"items_done", p.items_done}, {"ticks_used", p.ticks_used}, {"budget", p.budget},
                  {"stratum", p.stratum},       {"done", p.done},             {"estimate", detail::to_json(p.estimate)}};
    });
  });
  srv.Get("/sessions", [svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return json{{"sessions", svc->sessions()}}; });
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace uat::harness
