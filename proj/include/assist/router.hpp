#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "assist/chat_engine.hpp"
#include "assist/intent_cnn.hpp"
#include "assist/io.hpp"
#include "assist/knowledge_graph.hpp"
#include "assist/retrieval.hpp"
#include "assist/rules.hpp"
#include "assist/slot_filling.hpp"

namespace assist {

enum class Stage { kRule, kIntent, kSemanticParse, kKg, kEnrich, kClarify, kRetrieval, kChat, kSlotfill, kStaff };

std::string_view stage_name(Stage s);

struct StageRecord {
  Stage stage;
  json detail;  // per-stage inputs and outputs
};

struct RouteTrace {
  std::vector<StageRecord> stages;

  bool contains(Stage s) const;
  std::size_t count(Stage s) const;
  std::vector<std::string> stage_names() const;
  json to_json() const;
};

struct Response {
  std::string text;
  Stage source = Stage::kChat;
  std::optional<std::string> intent;
  std::optional<std::string> staff_scenario;
};

struct Turn {
  std::int64_t index = 0;
  std::string question;
  std::string reply;
  std::string source;
  std::int64_t timestamp = 0;  // unix seconds
  json trace;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct SessionState {
  std::string id;
  std::vector<Turn> history;
  std::optional<std::string> previous_question;
  std::optional<SlotState> slot;
  bool awaiting_description = false;  // human handoff asked for a description
  bool enrichment_used_this_turn = false;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

json session_to_json(const SessionState& s);
SessionState session_from_json(const json& j);

struct RouterConfig {
  int retry_limit = 2;
  int retrieval_k = 5;
  double retrieval_min_score = 1.0;  // s_min on the top BM25 score
  int chat_k = 5;
  double chat_threshold = 0.3;
  std::string default_answer = "Sorry, I am not sure I understand. Could you put it another way?";
  std::string clarify_prompt = "Could you tell me more about what you need regarding {node}?";
  std::string description_prompt =
      "Sure. Please briefly describe your problem and I will find the right service agent.";
  std::string staff_answer = "I am transferring you to a service agent for {scenario}.";
  std::string error_answer = "I am transferring you to a service agent.";
  std::string promo_fallback = "Please check the promotions page for current activities.";
};

/// Trained artifacts shared read-only by every session.
struct Engines {
  RuleTrie rules;
  std::map<std::string, std::string> promo_answers;  // promo target -> answer
  IntentClassifier intent;
  KnowledgeGraph graph;
  SchemaBundle schemas;
  InvertedIndex kb_index;
  InvertedIndex chat_index;
  Seq2SeqModel chat_model;
  std::shared_ptr<TaskExecutor> executor;
  RouterConfig config;
};

/// `{"id", "answer"}` per line.
std::map<std::string, std::string> load_promos(const std::filesystem::path& path);

/// Tagger backed by the graph's semantic parser, yielding tag tokens.
Tagger graph_tagger(const KnowledgeGraph& graph);

/// "previous question" + " " + q, at most once per turn; q unchanged
/// otherwise.
std::string enrich_with_context(const std::string& q, SessionState& session);

/// Routes one customer turn and appends it to the session history. Throws
/// EmptyQuestion on a blank question; stage failures degrade to a staff
/// handoff recorded in the trace.
std::pair<Response, RouteTrace> handle_turn(const Engines& engines, SessionState& session,
                                            const std::string& q, std::int64_t timestamp);

}  // namespace assist
