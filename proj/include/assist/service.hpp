#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "assist/config.hpp"
#include "assist/router.hpp"

namespace httplib {
class Server;
}

namespace assist {

/// Sessions keyed by id. Each session has its own lock held for a whole
/// turn. With a journal path, every change appends a full session snapshot;
/// construction replays the journal (last snapshot per id wins).
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path journal = {});

  std::string create();
  bool exists(const std::string& id) const;
  std::vector<std::string> ids() const;
  std::optional<SessionState> snapshot(const std::string& id) const;

  /// Runs `fn` on the session under its lock and journals the result.
  /// Returns false when the id is unknown.
  bool with_session(const std::string& id, const std::function<void(SessionState&)>& fn);

 private:
  struct Entry {
    std::mutex mutex;
    SessionState state;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(const SessionState& state);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::filesystem::path journal_;
  std::mutex journal_mutex_;
  std::uint64_t id_state_;
};

struct MessageRequest {
  std::optional<std::string> session_id;
  std::string text;
  bool debug = false;
  std::optional<std::int64_t> timestamp;  // unix seconds; wall clock when absent
};

struct HttpResult {
  int status = 200;
  json body;
};

/// Transport-independent request handling shared by the HTTP server and the
/// REPL.
class AssistService {
 public:
  AssistService(std::shared_ptr<const Engines> engines, std::filesystem::path journal = {});

  /// 400 on blank text, 404 on an unknown explicit session id, 500 with a
  /// staff-handoff reply on an unexpected failure.
  HttpResult handle_message(const MessageRequest& request);
  HttpResult get_session(const std::string& id) const;
  /// Parses a POST body `{"session_id"?, "text", "timestamp"?}`.
  HttpResult handle_message_body(const std::string& body, bool debug);

  SessionStore& store() { return store_; }
  const Engines& engines() const { return *engines_; }

 private:
  std::shared_ptr<const Engines> engines_;
  SessionStore store_;
};

json turn_to_json(const Turn& t);

/// HTTP front door: POST /v1/message (?debug=1 adds the trace),
/// GET /v1/session/{id}, GET /healthz.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<AssistService> service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  void stop();
  /// Blocks until the server stops.
  void wait();
  int port() const { return port_; }

 private:
  std::shared_ptr<AssistService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// Loads engines from the config and starts serving. Throws MissingArtifact
/// naming the missing path before binding.
std::unique_ptr<HttpServer> start_server(const AppConfig& config);

}  // namespace assist
