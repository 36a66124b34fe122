#include "assist/router.hpp"

#include <algorithm>
#include <cstdio>

#include "assist/error.hpp"

namespace assist {

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kRule: return "rule";
    case Stage::kIntent: return "intent";
    case Stage::kSemanticParse: return "semantic_parse";
    case Stage::kKg: return "kg";
    case Stage::kEnrich: return "enrich";
    case Stage::kClarify: return "clarify";
    case Stage::kRetrieval: return "retrieval";
    case Stage::kChat: return "chat";
    case Stage::kSlotfill: return "slotfill";
    case Stage::kStaff: return "staff";
  }
  return "staff";
}

bool RouteTrace::contains(Stage s) const { return count(s) > 0; }

std::size_t RouteTrace::count(Stage s) const {
  return static_cast<std::size_t>(std::count_if(stages.begin(), stages.end(),
                                                [s](const StageRecord& r) { return r.stage == s; }));
}

std::vector<std::string> RouteTrace::stage_names() const {
  std::vector<std::string> out;
  for (const auto& r : stages) out.emplace_back(stage_name(r.stage));
  return out;
}

json RouteTrace::to_json() const {
  json arr = json::array();
  for (const auto& r : stages) {
    json rec = r.detail.is_object() ? r.detail : json::object();
    rec["stage"] = stage_name(r.stage);
    arr.push_back(std::move(rec));
  }
  return arr;
}

namespace {

json filled_to_json(const FilledSlots& filled) {
  json j = json::object();
  for (const auto& [name, v] : filled)
    j[name] = {{"value", v.value}, {"raw", v.raw}, {"start", v.start}, {"end", v.end}};
  return j;
}

FilledSlots filled_from_json(const json& j) {
  FilledSlots out;
  for (const auto& [name, v] : j.items())
    out[name] = SlotValue{v.at("value"), v.at("raw"), v.at("start"), v.at("end")};
  return out;
}

}  // namespace

json session_to_json(const SessionState& s) {
  json j;
  j["id"] = s.id;
  j["history"] = json::array();
  for (const auto& t : s.history)
    j["history"].push_back({{"index", t.index}, {"question", t.question}, {"reply", t.reply},
                            {"source", t.source}, {"timestamp", t.timestamp}, {"trace", t.trace}});
  j["previous_question"] = s.previous_question ? json(*s.previous_question) : json(nullptr);
  if (s.slot) {
    j["slot"] = {{"task_id", s.slot->task_id},
                 {"filled", filled_to_json(s.slot->filled)},
                 {"awaiting", s.slot->awaiting ? json(*s.slot->awaiting) : json(nullptr)},
                 {"retries", s.slot->retries}};
  } else {
    j["slot"] = nullptr;
  }
  j["awaiting_description"] = s.awaiting_description;
  return j;
}

SessionState session_from_json(const json& j) {
  try {
    SessionState s;
    s.id = j.at("id");
    for (const auto& t : j.at("history"))
      s.history.push_back({t.at("index"), t.at("question"), t.at("reply"), t.at("source"),
                           t.at("timestamp"), t.at("trace")});
    if (!j.at("previous_question").is_null()) s.previous_question = j.at("previous_question");
    if (!j.at("slot").is_null()) {
      const auto& sl = j.at("slot");
      SlotState st;
      st.task_id = sl.at("task_id");
      st.filled = filled_from_json(sl.at("filled"));
      if (!sl.at("awaiting").is_null()) st.awaiting = sl.at("awaiting").get<std::string>();
      st.retries = sl.at("retries");
      s.slot = std::move(st);
    }
    s.awaiting_description = j.at("awaiting_description");
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::kMalformedFile, std::string("session record: ") + e.what());
  }
}

std::map<std::string, std::string> load_promos(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for (const auto& r : read_jsonl(path)) {
    if (!r.contains("id") || !r.contains("answer"))
      throw Error(Errc::kMalformedFile, path.string() + ": promo lacks id/answer");
    if (!out.emplace(r.at("id"), r.at("answer")).second)
      throw Error(Errc::kDuplicateId, "promo '" + r.at("id").get<std::string>() + "'");
  }
  return out;
}

Tagger graph_tagger(const KnowledgeGraph& graph) {
  return [&graph](const std::string& text) {
    std::vector<std::string> out;
    for (const auto& id : distinct_nodes(graph.parse_semantic_tags(normalize(text))))
      out.push_back(tag_token(id));
    return out;
  };
}

std::string enrich_with_context(const std::string& q, SessionState& session) {
  if (!session.previous_question || session.enrichment_used_this_turn) return q;
  session.enrichment_used_this_turn = true;
  return *session.previous_question + " " + q;
}

namespace {

std::string fill(std::string tmpl, const std::string& key, const std::string& value) {
  const std::string needle = "{" + key + "}";
  for (auto pos = tmpl.find(needle); pos != std::string::npos; pos = tmpl.find(needle, pos + value.size()))
    tmpl.replace(pos, needle.size(), value);
  return tmpl;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool is_chat_label(const std::string& label) { return label.rfind("chat.", 0) == 0; }

Date date_of(std::int64_t timestamp) {
  using namespace std::chrono;
  return Date{floor<days>(sys_seconds{seconds{timestamp}})};
}

json node_list(const std::vector<SemanticTag>& tags) { return json(distinct_nodes(tags)); }

class TurnRouter {
 public:
  TurnRouter(const Engines& e, SessionState& s, std::string q, std::int64_t ts)
      : e_(e), s_(s), q_(std::move(q)), norm_(normalize(q_)), today_(date_of(ts)) {}

  Response run() {
    try {
      return route();
    } catch (const Error& err) {
      if (err.code() == Errc::kEmptyQuestion) throw;
      return handoff(intent_label_.value_or("general"), {{"error", err.what()}});
    }
  }

  RouteTrace trace;

 private:
  void record(Stage st, json detail) { trace.stages.push_back({st, std::move(detail)}); }

  Response reply(Stage st, std::string text) {
    Response r;
    r.text = std::move(text);
    r.source = st;
    r.intent = intent_label_;
    return r;
  }

  Response handoff(const std::string& scenario, json detail) {
    detail["scenario"] = scenario;
    record(Stage::kStaff, std::move(detail));
    Response r = reply(Stage::kStaff, fill(e_.config.staff_answer, "scenario", scenario));
    r.staff_scenario = scenario;
    return r;
  }

  Response route() {
    if (s_.awaiting_description) {
      s_.awaiting_description = false;
      classify();
      return handoff(*intent_label_, {{"description", q_}});
    }
    if (s_.slot) return continue_task();

    const auto decision = route_by_rules(tokenize(norm_), e_.rules);
    if (decision.kind != RuleKind::kNoRule) return rule_hit(decision);

    const auto tags = classify();
    return knowledge_path(tags);
  }

  Response rule_hit(const RuleDecision& d) {
    json patterns = json::array();
    for (const auto& m : d.matched) patterns.push_back({{"start", m.start}, {"end", m.end}});
    record(Stage::kRule, {{"kind", rule_kind_name(d.kind)}, {"target", d.target}, {"matches", patterns}});
    switch (d.kind) {
      case RuleKind::kAssist: {
        s_.slot = SlotState{d.target, {}, std::nullopt, 0};
        return step_task();
      }
      case RuleKind::kPromo: {
        auto it = e_.promo_answers.find(d.target);
        return reply(Stage::kRule, it == e_.promo_answers.end() ? e_.config.promo_fallback : it->second);
      }
      case RuleKind::kHuman: {
        s_.awaiting_description = true;
        record(Stage::kStaff, {{"awaiting_description", true}});
        return reply(Stage::kStaff, e_.config.description_prompt);
      }
      case RuleKind::kNoRule: break;
    }
    return reply(Stage::kRule, e_.config.default_answer);
  }

  Response continue_task() { return step_task(); }

  Response step_task() {
    SlotState& st = *s_.slot;
    const std::string task = st.task_id;
    const auto result = advance(st, e_.schemas, q_, today_, e_.config.retry_limit);
    if (const auto* p = std::get_if<NextPrompt>(&result)) {
      record(Stage::kSlotfill, {{"task", task}, {"filled", filled_values(st.filled)}, {"prompt_slot", p->slot}});
      return reply(Stage::kSlotfill, p->prompt);
    }
    if (const auto* x = std::get_if<RetryExhausted>(&result)) {
      record(Stage::kSlotfill, {{"task", task}, {"retry_exhausted", x->slot}});
      s_.slot.reset();
      return handoff(task, json::object());
    }
    const auto& ready = std::get<ReadyToExecute>(result);
    const auto filled = filled_values(ready.filled);
    s_.slot.reset();
    const TaskSchema* schema = e_.schemas.find(task);
    try {
      if (!e_.executor) throw Error(Errc::kExecutorUnavailable, "no executor configured");
      std::string text = execute_task(ready.filled, *schema, *e_.executor);
      record(Stage::kSlotfill, {{"task", task}, {"filled", filled}, {"executed", true}});
      return reply(Stage::kSlotfill, std::move(text));
    } catch (const Error& err) {
      record(Stage::kSlotfill, {{"task", task}, {"filled", filled}, {"executed", false}, {"error", err.what()}});
      return handoff(task, json::object());
    }
  }

  static json filled_values(const FilledSlots& filled) {
    json j = json::object();
    for (const auto& [name, v] : filled) j[name] = v.value;
    return j;
  }

  std::vector<SemanticTag> classify() {
    const auto tags = e_.graph.parse_semantic_tags(norm_);
    std::vector<std::string> q_tags, ctx_tags;
    for (const auto& id : distinct_nodes(tags)) q_tags.push_back(tag_token(id));
    if (s_.previous_question)
      for (const auto& id : distinct_nodes(e_.graph.parse_semantic_tags(normalize(*s_.previous_question))))
        ctx_tags.push_back(tag_token(id));
    const auto pred = e_.intent.predict(q_, q_tags, ctx_tags);
    intent_label_ = e_.intent.label_name(pred.label);
    record(Stage::kIntent, {{"label", *intent_label_},
                            {"category", is_chat_label(*intent_label_) ? "chat" : "business"},
                            {"confidence", fixed6(pred.probs.at(static_cast<std::size_t>(pred.label)))}});
    return tags;
  }

  std::optional<Response> query_graph(const std::vector<SemanticTag>& tags) {
    const auto ans = e_.graph.answer_by_graph(tags);
    if (!ans) {
      record(Stage::kKg, {{"answer", nullptr}});
      return std::nullopt;
    }
    record(Stage::kKg, {{"item", ans->item->id}, {"hops", ans->hops},
                        {"matched_nodes", json(std::vector<std::string>(ans->matched_nodes.begin(),
                                                                        ans->matched_nodes.end()))}});
    return reply(Stage::kKg, ans->item->answer);
  }

  Response knowledge_path(std::vector<SemanticTag> tags) {
    record(Stage::kSemanticParse, {{"text", norm_}, {"nodes", node_list(tags)}});
    if (tags.empty()) return chat_path();

    if (auto r = query_graph(tags)) return *r;
    const std::string enriched = enrich_with_context(q_, s_);
    if (enriched != q_) {
      record(Stage::kEnrich, {{"text", enriched}});
      const std::string en = normalize(enriched);
      tags = e_.graph.parse_semantic_tags(en);
      record(Stage::kSemanticParse, {{"text", en}, {"nodes", node_list(tags)}});
      if (!tags.empty())
        if (auto r = query_graph(tags)) return *r;
    }

    const auto nodes = distinct_nodes(tags);
    if (nodes.size() == 1) {
      const GraphNode* n = e_.graph.node(nodes[0]);
      record(Stage::kClarify, {{"node", nodes[0]}});
      return reply(Stage::kClarify, fill(e_.config.clarify_prompt, "node", n ? n->label : nodes[0]));
    }

    const auto hits = search(e_.kb_index, q_, e_.config.retrieval_k);
    if (!hits.empty() && hits[0].score >= e_.config.retrieval_min_score) {
      record(Stage::kRetrieval, {{"id", hits[0].id}, {"score", fixed6(hits[0].score)}});
      return reply(Stage::kRetrieval, e_.kb_index.doc(hits[0].doc).answer);
    }
    record(Stage::kRetrieval, {{"id", nullptr},
                               {"score", hits.empty() ? json(nullptr) : json(fixed6(hits[0].score))}});
    return handoff(*intent_label_, json::object());
  }

  Response chat_path() {
    if (!is_chat_label(*intent_label_)) {
      record(Stage::kChat, {{"is_chat", false}, {"default", true}});
      return reply(Stage::kChat, e_.config.default_answer);
    }
    const auto r = chat_answer(q_, e_.chat_index, e_.chat_model, e_.config.chat_k, e_.config.chat_threshold);
    record(Stage::kChat, {{"is_chat", true},
                          {"mode", chat_source_name(r.source)},
                          {"confidence", fixed6(r.confidence)},
                          {"candidates", r.candidates.size()}});
    return reply(Stage::kChat, r.text);
  }

  const Engines& e_;
  SessionState& s_;
  std::string q_;
  std::string norm_;
  Date today_;
  std::optional<std::string> intent_label_;
};

}  // namespace

std::pair<Response, RouteTrace> handle_turn(const Engines& engines, SessionState& session,
                                            const std::string& q, std::int64_t timestamp) {
  if (normalize(q).empty()) throw Error(Errc::kEmptyQuestion, "question is blank");
  session.enrichment_used_this_turn = false;
  TurnRouter router(engines, session, q, timestamp);
  Response response = router.run();
  RouteTrace trace = std::move(router.trace);
  session.history.push_back({static_cast<std::int64_t>(session.history.size()), q, response.text,
                             std::string(stage_name(response.source)), timestamp, trace.to_json()});
  session.previous_question = q;
  session.enrichment_used_this_turn = false;
  return {std::move(response), std::move(trace)};
}

}  // namespace assist
