#include "assist/service.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "assist/error.hpp"
#include "httplib.h"

namespace assist {

SessionStore::SessionStore(std::filesystem::path journal) : journal_(std::move(journal)) {
  std::random_device rd;
  id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  if (journal_.empty() || !std::filesystem::exists(journal_)) return;
  for (const auto& rec : read_jsonl(journal_)) {
    auto entry = std::make_shared<Entry>();
    entry->state = session_from_json(rec.at("session"));
    sessions_[entry->state.id] = std::move(entry);
  }
}

std::string SessionStore::create() {
  std::shared_ptr<Entry> entry = std::make_shared<Entry>();
  {
    std::lock_guard lock(mutex_);
    std::mt19937_64 rng(id_state_);
    std::string id;
    do {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
      id = buf;
    } while (sessions_.count(id));
    id_state_ = rng();
    entry->state.id = id;
    sessions_[id] = entry;
  }
  persist(entry->state);
  return entry->state.id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionStore::exists(const std::string& id) const { return find(id) != nullptr; }

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::optional<SessionState> SessionStore::snapshot(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return std::nullopt;
  std::lock_guard lock(entry->mutex);
  return entry->state;
}

bool SessionStore::with_session(const std::string& id, const std::function<void(SessionState&)>& fn) {
  auto entry = find(id);
  if (!entry) return false;
  std::lock_guard lock(entry->mutex);
  try {
    fn(entry->state);
  } catch (...) {
    persist(entry->state);
    throw;
  }
  persist(entry->state);
  return true;
}

void SessionStore::persist(const SessionState& state) {
  if (journal_.empty()) return;
  const std::string line = json{{"session", session_to_json(state)}}.dump() + "\n";
  std::lock_guard lock(journal_mutex_);
  if (!journal_.parent_path().empty()) std::filesystem::create_directories(journal_.parent_path());
  std::ofstream out(journal_, std::ios::app | std::ios::binary);
  out << line;
  out.flush();
  if (!out) throw Error(Errc::kInvalidArgument, "cannot append to journal " + journal_.string());
}

json turn_to_json(const Turn& t) {
  return {{"index", t.index}, {"question", t.question}, {"reply", t.reply},
          {"source", t.source}, {"timestamp", t.timestamp}, {"trace", t.trace}};
}

AssistService::AssistService(std::shared_ptr<const Engines> engines, std::filesystem::path journal)
    : engines_(std::move(engines)), store_(std::move(journal)) {}

HttpResult AssistService::handle_message(const MessageRequest& request) {
  if (normalize(request.text).empty()) return {400, {{"error", "text must not be empty"}}};
  std::string id;
  if (request.session_id) {
    id = *request.session_id;
    if (!store_.exists(id)) return {404, {{"error", "unknown session"}, {"session_id", id}}};
  } else {
    id = store_.create();
  }
  const std::int64_t ts = request.timestamp.value_or(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
  HttpResult result;
  try {
    store_.with_session(id, [&](SessionState& s) {
      auto [response, trace] = handle_turn(*engines_, s, request.text, ts);
      json body{{"session_id", id},
                {"reply", response.text},
                {"source", stage_name(response.source)},
                {"turn", s.history.back().index}};
      if (response.intent) body["intent"] = *response.intent;
      if (response.staff_scenario) body["staff_scenario"] = *response.staff_scenario;
      if (request.debug) body["trace"] = trace.to_json();
      result = {200, std::move(body)};
    });
  } catch (const std::exception& e) {
    std::cerr << "error: session " << id << ": " << e.what() << "\n";
    return {500, {{"session_id", id},
                  {"reply", engines_->config.error_answer},
                  {"source", "staff"}}};
  }
  return result;
}

HttpResult AssistService::get_session(const std::string& id) const {
  const auto s = store_.snapshot(id);
  if (!s) return {404, {{"error", "unknown session"}, {"session_id", id}}};
  json turns = json::array();
  for (const auto& t : s->history) turns.push_back(turn_to_json(t));
  return {200, {{"session_id", id}, {"history", std::move(turns)}}};
}

HttpResult AssistService::handle_message_body(const std::string& body, bool debug) {
  MessageRequest req;
  req.debug = debug;
  try {
    const json j = json::parse(body);
    if (!j.is_object() || !j.contains("text") || !j.at("text").is_string())
      return {400, {{"error", "body must be an object with a string 'text'"}}};
    req.text = j.at("text");
    if (j.contains("session_id") && !j.at("session_id").is_null())
      req.session_id = j.at("session_id").get<std::string>();
    if (j.contains("timestamp") && !j.at("timestamp").is_null())
      req.timestamp = j.at("timestamp").get<std::int64_t>();
  } catch (const json::exception&) {
    return {400, {{"error", "malformed JSON body"}}};
  }
  return handle_message(req);
}

HttpServer::HttpServer(std::shared_ptr<AssistService> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };
  server_->Post("/v1/message", [this, send](const httplib::Request& req, httplib::Response& res) {
    const bool debug = req.has_param("debug") && req.get_param_value("debug") == "1";
    send(res, service_->handle_message_body(req.body, debug));
  });
  server_->Get(R"(/v1/session/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_->get_session(req.matches[1]));
  });
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(Errc::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void HttpServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::unique_ptr<HttpServer> start_server(const AppConfig& config) {
  auto engines = std::make_shared<const Engines>(load_engines(config));
  auto service = std::make_shared<AssistService>(engines, config.path("journal"));
  auto server = std::make_unique<HttpServer>(service);
  server->start(config.str("host"), static_cast<int>(config.integer("port")));
  return server;
}

}  // namespace assist
