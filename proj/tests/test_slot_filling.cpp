#include "assist/slot_filling.hpp"

#include <variant>

#include "assist/error.hpp"
#include "assist/io.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace assist;
using namespace std::chrono;

namespace {

const Date kToday{year{2026}, month{10}, day{19}};  // a Monday

SchemaBundle demo() {
  return load_schema_file(std::string(ASSIST_DATA_DIR) + "/demo/schemas.jsonl");
}

std::map<std::string, std::string> values(const FilledSlots& f) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : f) out[k] = v.value;
  return out;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::kInvalidArgument;
}

}  // namespace

TEST_CASE("flight schema loads with three mandatory slots") {
  const auto bundle = demo();
  const TaskSchema* flight = bundle.find("book_flight");
  REQUIRE(flight != nullptr);
  std::vector<std::string> mandatory;
  for (const auto& s : flight->slots)
    if (s.mandatory) mandatory.push_back(s.name + ":" + s.kind);
  CHECK(mandatory == std::vector<std::string>{"departure:location", "destination:location", "date:date"});
  CHECK(bundle.registry.size() >= 5);
}

TEST_CASE("schema validation") {
  CHECK(parse_schema_file("", "empty").schemas.empty());
  CHECK(code_of([] {
          parse_schema_file(
              R"({"task_id": "t", "slots": [{"name": "date", "kind": "date"}, {"name": "date", "kind": "date"}]})",
              "dup");
        }) == Errc::kDuplicateSlot);
  CHECK(code_of([] {
          parse_schema_file(R"({"task_id": "t", "slots": [{"name": "d", "kind": "date", "mandatory": false}]})",
                            "opt");
        }) == Errc::kNoMandatorySlot);
  CHECK(code_of([] { parse_schema_file("{not json", "bad"); }) == Errc::kMalformedFile);
  CHECK(code_of([] { parse_schema_file(R"({"task_id": "t"})", "noslots"); }) == Errc::kMalformedFile);
}

TEST_CASE("markers bind locations and relative dates resolve against the clock") {
  const auto bundle = demo();
  const auto& flight = *bundle.find("book_flight");
  const auto got = extract_slots("fly from hangzhou to beijing tomorrow", flight, bundle.registry, kToday);
  CHECK(values(got) == std::map<std::string, std::string>{
                           {"departure", "hangzhou"}, {"destination", "beijing"}, {"date", "2026-10-20"}});
  // Reversed word order still honors the markers.
  const auto rev = extract_slots("to beijing from hangzhou", flight, bundle.registry, kToday);
  CHECK(values(rev).at("departure") == "hangzhou");
  CHECK(values(rev).at("destination") == "beijing");
}

TEST_CASE("unmarked values fill same-kind slots in declaration order") {
  const auto bundle = demo();
  const auto& flight = *bundle.find("book_flight");
  CHECK(values(extract_slots("hangzhou beijing", flight, bundle.registry, kToday)) ==
        std::map<std::string, std::string>{{"departure", "hangzhou"}, {"destination", "beijing"}});
  CHECK(extract_slots("i want to book a flight ticket", flight, bundle.registry, kToday).empty());
}

TEST_CASE("date expressions") {
  const auto bundle = demo();
  const auto& flight = *bundle.find("book_flight");
  auto date_of = [&](const std::string& text) {
    return values(extract_slots(text, flight, bundle.registry, kToday))["date"];
  };
  CHECK(date_of("today") == "2026-10-19");
  CHECK(date_of("the day after tomorrow") == "2026-10-21");
  CHECK(date_of("next monday") == "2026-10-26");
  CHECK(date_of("friday") == "2026-10-23");
  CHECK(date_of("on 2026-12-31") == "2026-12-31");
  CHECK(date_of("明天") == "2026-10-20");
  CHECK(date_of("2026-02-30").empty());
}

TEST_CASE("quantity and phone recognizers") {
  const auto bundle = demo();
  const auto& recharge = *bundle.find("recharge_phone");
  const auto got = extract_slots("recharge 138-1234-5678 with 50", recharge, bundle.registry, kToday);
  CHECK(values(got) == std::map<std::string, std::string>{{"amount", "50"}, {"phone", "13812345678"}});
  CHECK(values(extract_slots("add five to +8613812345678", recharge, bundle.registry, kToday)) ==
        std::map<std::string, std::string>{{"amount", "5"}, {"phone", "+8613812345678"}});
}

TEST_CASE("extraction is pure for a fixed clock") {
  const auto bundle = demo();
  const auto& flight = *bundle.find("book_flight");
  const auto a = extract_slots("from shanghai to chengdu on friday", flight, bundle.registry, kToday);
  const auto b = extract_slots("from shanghai to chengdu on friday", flight, bundle.registry, kToday);
  CHECK(a == b);
}

TEST_CASE("advance prompts for the first unfilled mandatory slot") {
  const auto bundle = demo();
  SlotState state{"book_flight", {}, {}, 0};
  auto r = advance(state, bundle, "from hangzhou to beijing", kToday);
  REQUIRE(std::holds_alternative<NextPrompt>(r));
  CHECK(std::get<NextPrompt>(r).slot == "date");
  CHECK(state.awaiting == "date");

  r = advance(state, bundle, "tomorrow", kToday);
  REQUIRE(std::holds_alternative<ReadyToExecute>(r));
  CHECK(values(std::get<ReadyToExecute>(r).filled).at("date") == "2026-10-20");
  CHECK(!state.awaiting);

  SlotState full{"book_flight", {}, {}, 0};
  CHECK(std::holds_alternative<ReadyToExecute>(
      advance(full, bundle, "from hangzhou to beijing tomorrow", kToday)));
}

TEST_CASE("answers to prompts arrive one at a time") {
  const auto bundle = demo();
  SlotState state{"book_flight", {}, {}, 0};
  int prompts = 0;
  auto r = advance(state, bundle, "i want to book a flight ticket", kToday);
  const std::vector<std::string> answers{"hangzhou", "beijing", "tomorrow"};
  for (const auto& answer : answers) {
    REQUIRE(std::holds_alternative<NextPrompt>(r));
    ++prompts;
    const auto before = state.filled;
    r = advance(state, bundle, answer, kToday);
    for (const auto& [k, v] : before) CHECK(state.filled.at(k) == v);  // never lose a slot
  }
  CHECK(std::holds_alternative<ReadyToExecute>(r));
  CHECK(prompts == 3);
  CHECK(values(state.filled) == std::map<std::string, std::string>{
                                    {"departure", "hangzhou"}, {"destination", "beijing"}, {"date", "2026-10-20"}});
}

TEST_CASE("invalid answers re-prompt until the retry limit") {
  const auto bundle = demo();
  SlotState state{"book_flight", {}, std::string("departure"), 0};
  auto r = advance(state, bundle, "atlantis", kToday, 1);
  REQUIRE(std::holds_alternative<NextPrompt>(r));
  CHECK(std::get<NextPrompt>(r).slot == "departure");
  r = advance(state, bundle, "still atlantis", kToday, 1);
  CHECK(std::holds_alternative<RetryExhausted>(r));

  SlotState unknown{"nope", {}, {}, 0};
  CHECK(code_of([&] { advance(unknown, bundle, "x", kToday); }) == Errc::kUnknownTask);
}

TEST_CASE("open kinds accept free-text answers") {
  auto bundle = parse_schema_file(
      R"({"kind": "product", "open": true}
{"task_id": "buy", "slots": [{"name": "item", "kind": "product", "prompt": "what item?"}]})",
      "mem");
  SlotState state{"buy", {}, std::string("item"), 0};
  auto r = advance(state, bundle, "a blue umbrella", kToday);
  REQUIRE(std::holds_alternative<ReadyToExecute>(r));
  CHECK(state.filled.at("item").value == "a blue umbrella");
}

TEST_CASE("execute_task renders the confirmation or surfaces failures") {
  const auto bundle = demo();
  const auto& flight = *bundle.find("book_flight");
  const auto filled = extract_slots("from hangzhou to beijing tomorrow", flight, bundle.registry, kToday);

  MockExecutor ok(MockExecutor::Mode::kAccept, "", "AB123");
  const auto text = execute_task(filled, flight, ok);
  CHECK(text.find("AB123") != std::string::npos);
  CHECK(text.find("hangzhou") != std::string::npos);

  MockExecutor timeout(MockExecutor::Mode::kTimeout);
  CHECK(code_of([&] { execute_task(filled, flight, timeout); }) == Errc::kExecutorUnavailable);

  MockExecutor reject(MockExecutor::Mode::kReject, "no seats");
  try {
    execute_task(filled, flight, reject);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kExecutorRejected);
    CHECK(e.detail() == "no seats");
  }

  MockExecutor derived;
  CHECK(derived.execute({"t", {{"a", "b"}}}).reference ==
        MockExecutor::reference_for({"t", {{"a", "b"}}}));
}

TEST_CASE("HTTP executor speaks the wire contract") {
  httplib::Server server;
  std::string seen;
  server.Post("/execute", [&](const httplib::Request& req, httplib::Response& res) {
    seen = req.body;
    const auto body = json::parse(req.body);
    if (body["slots"]["destination"] == "nowhere") {
      res.set_content(R"({"ok": false, "reason": "no seats"})", "application/json");
    } else {
      res.set_content(R"({"ok": true, "reference": "ZX9"})", "application/json");
    }
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpExecutor exec("http://127.0.0.1:" + std::to_string(port));
  const auto ok = exec.execute({"book_flight", {{"destination", "beijing"}}});
  CHECK(ok.ok);
  CHECK(ok.reference == "ZX9");
  CHECK(json::parse(seen) == json::parse(R"({"task_id": "book_flight", "slots": {"destination": "beijing"}})"));
  const auto no = exec.execute({"book_flight", {{"destination", "nowhere"}}});
  CHECK(!no.ok);
  CHECK(no.reason == "no seats");
  server.stop();
  t.join();

  HttpExecutor dead("http://127.0.0.1:" + std::to_string(port), "/execute", 200);
  CHECK(code_of([&] { dead.execute({"x", {}}); }) == Errc::kExecutorUnavailable);
}
