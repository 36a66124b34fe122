#include "assist/slot_filling.hpp"

#include <algorithm>
#include <cstdio>

#include "assist/error.hpp"
#include "assist/io.hpp"
#include "httplib.h"

namespace assist {

namespace {

using std::chrono::days;
using std::chrono::sys_days;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<Date> parse_iso_date(std::string_view s) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (s.size() != 10 || std::sscanf(std::string(s).c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

Date shift(const Date& today, int n) { return Date{sys_days{today} + days{n}}; }

const std::vector<std::pair<std::string, unsigned>>& weekday_names() {
  static const std::vector<std::pair<std::string, unsigned>> names{
      {"sunday", 0}, {"monday", 1}, {"tuesday", 2}, {"wednesday", 3},
      {"thursday", 4}, {"friday", 5}, {"saturday", 6}};
  return names;
}

// Relative day phrases, longest first.
const std::vector<std::pair<std::vector<std::string>, int>>& relative_days() {
  static const std::vector<std::pair<std::vector<std::string>, int>> phrases{
      {{"the", "day", "after", "tomorrow"}, 2},
      {{"day", "after", "tomorrow"}, 2},
      {{"today"}, 0},
      {{"tonight"}, 0},
      {{"tomorrow"}, 1},
      {{"今", "天"}, 0},
      {{"明", "天"}, 1},
      {{"后", "天"}, 2},
  };
  return phrases;
}

const std::map<std::string, int>& number_words() {
  static const std::map<std::string, int> words{
      {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4}, {"five", 5}, {"six", 6},
      {"seven", 7}, {"eight", 8}, {"nine", 9}, {"ten", 10}, {"eleven", 11}, {"twelve", 12}};
  return words;
}

std::optional<std::pair<std::size_t, std::string>> date_at(std::span<const std::string> tokens,
                                                           std::size_t i, const Date& today) {
  for (const auto& [phrase, offset] : relative_days()) {
    if (i + phrase.size() <= tokens.size() &&
        std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<long>(i)))
      return std::pair{phrase.size(), format_date(shift(today, offset))};
  }
  std::size_t skip = 0;
  if (tokens[i] == "next" && i + 1 < tokens.size()) skip = 1;
  for (const auto& [name, wd] : weekday_names()) {
    if (tokens[i + skip] == name) {
      const unsigned current = std::chrono::weekday{sys_days{today}}.c_encoding();
      int ahead = static_cast<int>((wd + 7 - current) % 7);
      if (ahead == 0) ahead = 7;
      return std::pair{skip + 1, format_date(shift(today, ahead))};
    }
  }
  if (auto iso = parse_iso_date(tokens[i])) return std::pair{std::size_t{1}, format_date(*iso)};
  return std::nullopt;
}

std::string digits_of(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c >= '0' && c <= '9') out.push_back(c);
  return out;
}

bool phone_like(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || c == '-')) return false;
  const auto n = digits_of(s).size();
  return n >= 7 && n <= 15;
}

}  // namespace

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::vector<Mention> AttributeKind::find(std::span<const std::string> tokens,
                                         const Date& today) const {
  std::vector<Mention> out;
  switch (recognizer) {
    case Recognizer::kGazetteer: {
      std::vector<std::vector<std::string>> entries;
      for (const auto& e : gazetteer) entries.push_back(tokenize(normalize(e)));
      std::size_t i = 0;
      while (i < tokens.size()) {
        std::size_t best = 0;
        const std::vector<std::string>* hit = nullptr;
        for (const auto& e : entries) {
          if (e.empty() || e.size() <= best || i + e.size() > tokens.size()) continue;
          if (std::equal(e.begin(), e.end(), tokens.begin() + static_cast<long>(i))) {
            best = e.size();
            hit = &e;
          }
        }
        if (hit != nullptr) {
          out.push_back({i, i + best, detokenize(*hit)});
          i += best;
        } else {
          ++i;
        }
      }
      break;
    }
    case Recognizer::kDate: {
      std::size_t i = 0;
      while (i < tokens.size()) {
        if (auto hit = date_at(tokens, i, today)) {
          out.push_back({i, i + hit->first, hit->second});
          i += hit->first;
        } else {
          ++i;
        }
      }
      break;
    }
    case Recognizer::kQuantity:
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (all_digits(tokens[i]) && tokens[i].size() <= 6) {
          out.push_back({i, i + 1, std::to_string(std::stol(tokens[i]))});
        } else if (auto it = number_words().find(tokens[i]); it != number_words().end()) {
          out.push_back({i, i + 1, std::to_string(it->second)});
        }
      }
      break;
    case Recognizer::kPhone:
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] == "+" && i + 1 < tokens.size() && phone_like(tokens[i + 1])) {
          out.push_back({i, i + 2, "+" + digits_of(tokens[i + 1])});
          ++i;
        } else if (phone_like(tokens[i])) {
          out.push_back({i, i + 1, digits_of(tokens[i])});
        }
      }
      break;
  }
  return out;
}

std::optional<std::string> AttributeKind::validate(const std::string& normalized,
                                                   const Date& today) const {
  const auto tokens = tokenize(normalized);
  if (tokens.empty()) return std::nullopt;
  const auto mentions = find(tokens, today);
  if (mentions.size() == 1 && mentions[0].start == 0 && mentions[0].end == tokens.size())
    return mentions[0].value;
  if (open) return normalized;
  return std::nullopt;
}

AttributeRegistry AttributeRegistry::with_defaults() {
  AttributeRegistry r;
  r.add({"product", AttributeKind::Recognizer::kGazetteer, {}, false});
  r.add({"location", AttributeKind::Recognizer::kGazetteer, {}, false});
  r.add({"date", AttributeKind::Recognizer::kDate, {}, false});
  r.add({"quantity", AttributeKind::Recognizer::kQuantity, {}, false});
  r.add({"phone", AttributeKind::Recognizer::kPhone, {}, false});
  return r;
}

void AttributeRegistry::add(AttributeKind kind) {
  const std::string name = kind.name;
  kinds_.insert_or_assign(name, std::move(kind));
}

void AttributeRegistry::extend_gazetteer(const std::string& kind,
                                         std::span<const std::string> entries) {
  auto it = kinds_.find(kind);
  if (it == kinds_.end()) {
    it = kinds_.emplace(kind, AttributeKind{kind, AttributeKind::Recognizer::kGazetteer, {}, false})
             .first;
  }
  if (it->second.recognizer != AttributeKind::Recognizer::kGazetteer)
    throw Error(Errc::kMalformedFile, "kind '" + kind + "' is not dictionary based");
  for (const auto& e : entries) it->second.gazetteer.push_back(normalize(e));
}

const AttributeKind* AttributeRegistry::find(std::string_view name) const {
  auto it = kinds_.find(name);
  return it == kinds_.end() ? nullptr : &it->second;
}

const SlotSpec* TaskSchema::slot(std::string_view name) const {
  for (const auto& s : slots)
    if (s.name == name) return &s;
  return nullptr;
}

const TaskSchema* SchemaBundle::find(std::string_view task_id) const {
  for (const auto& s : schemas)
    if (s.task_id == task_id) return &s;
  return nullptr;
}

SchemaBundle parse_schema_file(const std::string& text, const std::string& origin) {
  SchemaBundle bundle;
  for (const auto& record : parse_jsonl(text, origin)) {
    try {
      if (record.contains("kind")) {
        const auto kind = record.at("kind").get<std::string>();
        const auto entries = record.value("gazetteer", std::vector<std::string>{});
        bundle.registry.extend_gazetteer(kind, entries);
        if (record.value("open", false)) {
          AttributeKind k = *bundle.registry.find(kind);
          k.open = true;
          bundle.registry.add(std::move(k));
        }
        continue;
      }
      TaskSchema schema;
      schema.task_id = record.at("task_id").get<std::string>();
      schema.confirmation = record.value("confirmation", std::string("done, reference {reference}"));
      std::set<std::string> names;
      bool any_mandatory = false;
      for (const auto& s : record.at("slots")) {
        SlotSpec spec;
        spec.name = s.at("name").get<std::string>();
        spec.kind = s.at("kind").get<std::string>();
        spec.mandatory = s.value("mandatory", true);
        spec.prompt = s.value("prompt", "please provide the " + spec.name);
        for (const auto& m : s.value("markers", std::vector<std::string>{}))
          spec.markers.push_back(normalize(m));
        if (!names.insert(spec.name).second)
          throw Error(Errc::kDuplicateSlot, schema.task_id + "." + spec.name);
        any_mandatory = any_mandatory || spec.mandatory;
        schema.slots.push_back(std::move(spec));
      }
      if (!any_mandatory) throw Error(Errc::kNoMandatorySlot, schema.task_id);
      if (bundle.find(schema.task_id) != nullptr)
        throw Error(Errc::kDuplicateId, "task " + schema.task_id);
      bundle.schemas.push_back(std::move(schema));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::kMalformedFile, origin + ": " + e.what());
    }
  }
  for (const auto& schema : bundle.schemas) {
    for (const auto& s : schema.slots) {
      if (bundle.registry.find(s.kind) == nullptr)
        throw Error(Errc::kMalformedFile,
                    schema.task_id + "." + s.name + ": unknown attribute kind '" + s.kind + "'");
    }
  }
  return bundle;
}

SchemaBundle load_schema_file(const std::filesystem::path& path) {
  return parse_schema_file(read_file(path), path.string());
}

std::vector<TaskSchema> load_schemas(const std::filesystem::path& path) {
  return load_schema_file(path).schemas;
}

FilledSlots extract_slots(const std::string& text, const TaskSchema& schema,
                          const AttributeRegistry& registry, const Date& today,
                          const std::set<std::string>& skip, const std::string& preferred) {
  const auto tokens = tokenize(normalize(text));
  std::map<std::string, std::vector<Mention>> mentions;
  for (const auto& s : schema.slots) {
    if (mentions.count(s.kind)) continue;
    const AttributeKind* kind = registry.find(s.kind);
    mentions[s.kind] = kind ? kind->find(tokens, today) : std::vector<Mention>{};
  }

  std::vector<std::pair<std::size_t, std::size_t>> used;
  auto overlaps = [&](const Mention& m) {
    return std::any_of(used.begin(), used.end(),
                       [&](const auto& u) { return m.start < u.second && u.first < m.end; });
  };
  auto marker_owner = [&](const Mention& m) -> const SlotSpec* {
    if (m.start == 0) return nullptr;
    for (const auto& s : schema.slots) {
      if (std::find(s.markers.begin(), s.markers.end(), tokens[m.start - 1]) != s.markers.end())
        return &s;
    }
    return nullptr;
  };

  FilledSlots filled;
  auto take = [&](const SlotSpec& slot, const Mention& m) {
    std::vector<std::string> span(tokens.begin() + static_cast<long>(m.start),
                                  tokens.begin() + static_cast<long>(m.end));
    filled[slot.name] = SlotValue{m.value, detokenize(span), m.start, m.end};
    used.emplace_back(m.start, m.end);
  };

  // Role markers bind first.
  for (const auto& slot : schema.slots) {
    if (skip.count(slot.name) || slot.markers.empty()) continue;
    for (const auto& m : mentions[slot.kind]) {
      if (!overlaps(m) && marker_owner(m) == &slot) {
        take(slot, m);
        break;
      }
    }
  }

  std::vector<const SlotSpec*> order;
  if (const SlotSpec* p = schema.slot(preferred)) order.push_back(p);
  for (const auto& slot : schema.slots)
    if (slot.name != preferred) order.push_back(&slot);
  for (const SlotSpec* slot : order) {
    if (skip.count(slot->name) || filled.count(slot->name)) continue;
    for (const auto& m : mentions[slot->kind]) {
      const SlotSpec* owner = marker_owner(m);
      if (overlaps(m) || (owner != nullptr && owner != slot && owner->kind == slot->kind)) continue;
      take(*slot, m);
      break;
    }
  }
  return filled;
}

AdvanceResult advance(SlotState& state, const SchemaBundle& bundle, const std::string& user_text,
                      const Date& today, int retry_limit) {
  const TaskSchema* schema = bundle.find(state.task_id);
  if (schema == nullptr) throw Error(Errc::kUnknownTask, state.task_id);

  std::set<std::string> skip;
  for (const auto& [name, _] : state.filled) skip.insert(name);
  const std::string text = normalize(user_text);
  for (auto& [name, value] : extract_slots(text, *schema, bundle.registry, today, skip,
                                           state.awaiting.value_or(std::string{}))) {
    state.filled.emplace(name, std::move(value));
  }

  if (state.awaiting && !state.filled.count(*state.awaiting)) {
    const SlotSpec* slot = schema->slot(*state.awaiting);
    const AttributeKind* kind = slot ? bundle.registry.find(slot->kind) : nullptr;
    std::optional<std::string> value;
    if (kind != nullptr && !text.empty()) value = kind->validate(text, today);
    if (value) {
      state.filled[*state.awaiting] = SlotValue{*value, text, 0, tokenize(text).size()};
    } else {
      ++state.retries;
      if (state.retries > retry_limit) return RetryExhausted{*state.awaiting};
      return NextPrompt{slot->name, slot->prompt};
    }
  }
  state.retries = 0;
  for (const auto& slot : schema->slots) {
    if (slot.mandatory && !state.filled.count(slot.name)) {
      state.awaiting = slot.name;
      return NextPrompt{slot.name, slot.prompt};
    }
  }
  state.awaiting.reset();
  return ReadyToExecute{state.filled};
}

MockExecutor::MockExecutor(Mode mode, std::string reason, std::string fixed_reference)
    : mode_(mode), reason_(std::move(reason)), fixed_reference_(std::move(fixed_reference)) {}

std::string MockExecutor::reference_for(const ExecutorRequest& request) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xFF;
    h *= 1099511628211ULL;
  };
  mix(request.task_id);
  for (const auto& [k, v] : request.slots) {
    mix(k);
    mix(v);
  }
  static const char* alphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
  std::string ref;
  for (int i = 0; i < 6; ++i) {
    ref.push_back(alphabet[h % 32]);
    h /= 32;
  }
  return ref;
}

ExecutorResponse MockExecutor::execute(const ExecutorRequest& request) {
  switch (mode_) {
    case Mode::kTimeout:
      throw Error(Errc::kExecutorUnavailable, "mock executor timed out");
    case Mode::kReject:
      return {false, {}, reason_};
    case Mode::kAccept:
      break;
  }
  return {true, fixed_reference_.empty() ? reference_for(request) : fixed_reference_, {}};
}

std::string executor_request_json(const ExecutorRequest& request) {
  return json{{"task_id", request.task_id}, {"slots", request.slots}}.dump();
}

ExecutorResponse parse_executor_response(const std::string& body) {
  try {
    const json j = json::parse(body);
    ExecutorResponse r;
    r.ok = j.at("ok").get<bool>();
    r.reference = j.value("reference", std::string{});
    r.reason = j.value("reason", std::string{});
    return r;
  } catch (const std::exception& e) {
    throw Error(Errc::kExecutorUnavailable, std::string("malformed executor response: ") + e.what());
  }
}

HttpExecutor::HttpExecutor(std::string base_url, std::string path, int timeout_ms)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_ms_(timeout_ms) {}

ExecutorResponse HttpExecutor::execute(const ExecutorRequest& request) {
  httplib::Client client(base_url_);
  const auto timeout = std::chrono::milliseconds(timeout_ms_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(path_, executor_request_json(request), "application/json");
  if (!res) throw Error(Errc::kExecutorUnavailable, base_url_ + path_ + ": " + httplib::to_string(res.error()));
  if (res->status >= 500) throw Error(Errc::kExecutorUnavailable, "executor status " + std::to_string(res->status));
  return parse_executor_response(res->body);
}

std::string execute_task(const FilledSlots& filled, const TaskSchema& schema,
                         TaskExecutor& executor) {
  ExecutorRequest request{schema.task_id, {}};
  for (const auto& [name, v] : filled) request.slots[name] = v.value;
  const ExecutorResponse response = executor.execute(request);
  if (!response.ok) throw Error(Errc::kExecutorRejected, response.reason);

  std::string out;
  const std::string& tpl = schema.confirmation;
  for (std::size_t i = 0; i < tpl.size();) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i);
      if (close != std::string::npos) {
        const std::string key = tpl.substr(i + 1, close - i - 1);
        if (key == "reference") {
          out += response.reference;
        } else if (auto it = request.slots.find(key); it != request.slots.end()) {
          out += it->second;
        }
        i = close + 1;
        continue;
      }
    }
    out.push_back(tpl[i++]);
  }
  return out;
}

}  // namespace assist
