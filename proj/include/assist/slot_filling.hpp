#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "assist/text.hpp"

namespace assist {

/// Calendar date used for resolving relative expressions ("tomorrow").
using Date = std::chrono::year_month_day;

std::string format_date(const Date& date);

/// A typed value found in user text: token span [start, end) and its
/// canonical value (e.g. "2026-10-20" for "tomorrow").
struct Mention {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string value;
};

/// One kind of attribute and how to recognize it. Built-in recognizers cover
/// dates, quantities and phone numbers; gazetteer kinds (product, location)
/// match dictionary entries by greedy longest match.
struct AttributeKind {
  enum class Recognizer { kGazetteer, kDate, kQuantity, kPhone };

  std::string name;
  Recognizer recognizer = Recognizer::kGazetteer;
  std::vector<std::string> gazetteer;
  /// Open kinds accept any non-empty answer to a direct prompt.
  bool open = false;

  std::vector<Mention> find(std::span<const std::string> tokens, const Date& today) const;
  /// Whole-text validation used when the user answers a prompt directly.
  std::optional<std::string> validate(const std::string& normalized, const Date& today) const;
};

class AttributeRegistry {
 public:
  /// product, location, date, quantity, phone.
  static AttributeRegistry with_defaults();

  void add(AttributeKind kind);
  /// Extends a gazetteer kind, creating it if needed.
  void extend_gazetteer(const std::string& kind, std::span<const std::string> entries);
  const AttributeKind* find(std::string_view name) const;
  std::size_t size() const { return kinds_.size(); }

 private:
  std::map<std::string, AttributeKind, std::less<>> kinds_;
};

struct SlotSpec {
  std::string name;
  std::string kind;
  bool mandatory = true;
  std::string prompt;
  std::vector<std::string> markers;  // role words that precede a value: "from", "to"
};

struct TaskSchema {
  std::string task_id;
  std::vector<SlotSpec> slots;
  std::string confirmation;  // "{slot}" and "{reference}" placeholders

  const SlotSpec* slot(std::string_view name) const;
};

struct SchemaBundle {
  std::vector<TaskSchema> schemas;
  AttributeRegistry registry = AttributeRegistry::with_defaults();

  const TaskSchema* find(std::string_view task_id) const;
};

/// JSON lines: `{"task_id", "slots": [{name, kind, mandatory, prompt,
/// markers?}], "confirmation"}` for tasks and `{"kind", "gazetteer": [...]}`
/// for attribute dictionaries.
SchemaBundle parse_schema_file(const std::string& text, const std::string& origin);
SchemaBundle load_schema_file(const std::filesystem::path& path);
std::vector<TaskSchema> load_schemas(const std::filesystem::path& path);

struct SlotValue {
  std::string value;
  std::string raw;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SlotValue&, const SlotValue&) = default;
};

using FilledSlots = std::map<std::string, SlotValue>;

/// Assigns recognized values to schema slots. Values right after a slot's
/// role marker go to that slot; remaining values fill same-kind slots in
/// declaration order (`preferred` first when given). A span fills at most
/// one slot and slots in `skip` are left alone.
FilledSlots extract_slots(const std::string& text, const TaskSchema& schema,
                          const AttributeRegistry& registry, const Date& today,
                          const std::set<std::string>& skip = {},
                          const std::string& preferred = {});

struct SlotState {
  std::string task_id;
  FilledSlots filled;
  std::optional<std::string> awaiting;
  int retries = 0;

  friend bool operator==(const SlotState&, const SlotState&) = default;
};

struct NextPrompt {
  std::string slot;
  std::string prompt;
};
struct ReadyToExecute {
  FilledSlots filled;
};
/// The awaited slot was not answered validly within the retry limit.
struct RetryExhausted {
  std::string slot;
};

using AdvanceResult = std::variant<NextPrompt, ReadyToExecute, RetryExhausted>;

/// Merges one user turn into the state and decides the next step.
AdvanceResult advance(SlotState& state, const SchemaBundle& bundle, const std::string& user_text,
                      const Date& today, int retry_limit = 2);

// Task execution -----------------------------------------------------------

struct ExecutorRequest {
  std::string task_id;
  std::map<std::string, std::string> slots;
};

struct ExecutorResponse {
  bool ok = false;
  std::string reference;
  std::string reason;
};

/// Third-party service that completes a task. Implementations throw
/// Error(kExecutorUnavailable) when the service cannot be reached.
class TaskExecutor {
 public:
  virtual ~TaskExecutor() = default;
  virtual ExecutorResponse execute(const ExecutorRequest& request) = 0;
};

/// Deterministic in-process executor. The booking reference is derived from
/// the request content.
class MockExecutor : public TaskExecutor {
 public:
  enum class Mode { kAccept, kReject, kTimeout };

  explicit MockExecutor(Mode mode = Mode::kAccept, std::string reason = "no seats",
                        std::string fixed_reference = {});
  ExecutorResponse execute(const ExecutorRequest& request) override;

  static std::string reference_for(const ExecutorRequest& request);

 private:
  Mode mode_;
  std::string reason_;
  std::string fixed_reference_;
};

/// POSTs `{"task_id", "slots"}` to `base_url + path` and expects
/// `{"ok": bool, "reference" | "reason"}`.
class HttpExecutor : public TaskExecutor {
 public:
  HttpExecutor(std::string base_url, std::string path = "/execute", int timeout_ms = 2000);
  ExecutorResponse execute(const ExecutorRequest& request) override;

 private:
  std::string base_url_;
  std::string path_;
  int timeout_ms_;
};

std::string executor_request_json(const ExecutorRequest& request);
ExecutorResponse parse_executor_response(const std::string& body);

/// Calls the executor and renders the confirmation template. Throws
/// kExecutorUnavailable or kExecutorRejected (message carries the reason).
std::string execute_task(const FilledSlots& filled, const TaskSchema& schema,
                         TaskExecutor& executor);

}  // namespace assist
