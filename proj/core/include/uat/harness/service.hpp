#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "uat/controller/controller.hpp"
#include "uat/harness/spec.hpp"

namespace uat::harness {

class SessionNotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An answer naming an item that is not the one outstanding and was never scored.
class UnknownItem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Milliseconds on some fixed epoch. Injectable so tests control time.
using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

/// What a subject sees for one item. Times are absolute clock milliseconds.
struct ItemView {
  std::uint64_t item = 0;
  std::string rendering;
  std::string codec;
  int channel = 0;
  std::string config;
  int stratum = 0;
  std::int64_t issued_ms = 0;
  std::int64_t working_ms = 0;
  std::int64_t deadline_ms = 0;
};

struct NextResult {
  bool done = false;
  std::optional<ItemView> item;
};

struct AnswerResult {
  /// False for answers sent during the exposition window; they are ignored.
  bool accepted = false;
  /// The answer arrived after the working window: scored 0.
  bool expired = false;
  /// The item was already scored; nothing changed.
  bool duplicate = false;
  double score = 0.0;
  std::string reason;
};

struct Progress {
  std::size_t items_done = 0;
  std::uint64_t ticks_used = 0;
  std::uint64_t budget = 0;
  int stratum = 0;
  bool done = false;
  controller::UEstimate estimate;
};

struct ServiceOptions {
  /// Directory of append-only per-session logs; empty keeps everything in memory.
  std::string store_dir;
  Clock clock;
};

/// Adaptive tests for external subjects. One TestSession per subject; items
/// are issued on request and scored by the clock time of the answer. Every
/// state change is appended to the session's log before it takes effect in
/// memory, and constructing the service replays existing logs.
class SessionService {
 public:
  SessionService(ExperimentSpec spec, taskgen::Bank bank, ServiceOptions options);
  ~SessionService();

  std::string create(std::optional<std::uint64_t> seed = std::nullopt);
  NextResult next(const std::string& id);
  AnswerResult answer(const std::string& id, std::uint64_t item, const std::optional<std::string>& answer);
  Progress progress(const std::string& id);
  std::vector<std::string> sessions() const;
  controller::History history(const std::string& id);

  const ExperimentSpec& spec() const { return spec_; }

 private:
  struct Session;
  Session& find(const std::string& id);
  void expire_if_late(Session& s, std::int64_t now);
  void append(Session& s, const std::string& line);
  void replay(const std::string& path);
  Session& open(const std::string& id, std::uint64_t seed);

  ExperimentSpec spec_;
  taskgen::Bank bank_;
  interface::ConfigurationSpace space_;
  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP front end over a SessionService.
///
///   POST /sessions               {"seed": n?}            -> {"session": id}
///   GET  /sessions/{id}/next                             -> {"done": bool, "item": {...}|null}
///   POST /sessions/{id}/answer   {"item": n, "answer": "m"|null}
///   GET  /sessions/{id}/progress
///
/// Unknown sessions answer 404, malformed requests 400.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uat::harness
