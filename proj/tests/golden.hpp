#pragma once
// Scripted conversations and their recorded traces. Set ASSIST_UPDATE_GOLDEN=1
// to re-record; otherwise replays must match the files byte for byte.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "assist/router.hpp"

namespace golden {

struct Script {
  std::string name;
  std::vector<std::string> questions;
};

inline constexpr std::int64_t kBaseTime = 1700000000;  // 2023-11-14 UTC

inline const std::vector<Script>& scripts() {
  static const std::vector<Script> s{
      {"rule_promo", {"red envelopes", "where is double eleven"}},
      {"rule_human", {"I want to talk to a real person", "my order was damaged"}},
      {"demo_a_flight", {"I want to book a flight ticket", "from hangzhou", "to beijing", "tomorrow"}},
      {"demo_b_clarify", {"I want to check", "Taobao account"}},
      {"demo_c_chat", {"I am unhappy"}},
      {"kg_direct", {"check my taobao account"}},
      {"kg_one_hop", {"I forgot my login password"}},
      {"retrieval", {"cancel my refund"}},
      {"staff_handoff", {"freeze my membership points"}},
      {"default_answer", {"thanks a lot"}},
      {"slot_retry_exhausted", {"book a flight", "blah", "blah", "blah"}},
      {"mixed_session",
       {"hello", "I forgot my login password", "cancel my refund", "freeze my membership points",
        "top up my phone", "13800138000", "50", "I am unhappy"}},
  };
  return s;
}

inline std::filesystem::path path_of(const Script& s) {
  return std::filesystem::path(ASSIST_GOLDEN_DIR) / (s.name + ".jsonl");
}

/// One compact JSON line per turn.
inline std::vector<std::string> replay(const assist::Engines& engines, const Script& s) {
  assist::SessionState session;
  session.id = "golden-" + s.name;
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < s.questions.size(); ++i) {
    const std::int64_t ts = kBaseTime + 60 * static_cast<std::int64_t>(i);
    const auto [resp, trace] = assist::handle_turn(engines, session, s.questions[i], ts);
    assist::json j{{"question", s.questions[i]},
                   {"timestamp", ts},
                   {"reply", resp.text},
                   {"source", std::string(assist::stage_name(resp.source))},
                   {"trace", trace.to_json()}};
    lines.push_back(j.dump());
  }
  return lines;
}

inline bool updating() {
  const char* v = std::getenv("ASSIST_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Returns an empty string on match, else a description of the first diff.
inline std::string check(const assist::Engines& engines, const Script& s) {
  const auto got = replay(engines, s);
  const auto p = path_of(s);
  if (updating()) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::trunc);
    for (const auto& l : got) out << l << "\n";
    return {};
  }
  if (!std::filesystem::exists(p)) return "missing golden file " + p.string();
  const auto want = read_lines(p);
  if (want.size() != got.size())
    return s.name + ": " + std::to_string(got.size()) + " turns, golden has " + std::to_string(want.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    if (want[i] != got[i]) return s.name + " turn " + std::to_string(i) + ":\n  want " + want[i] + "\n  got  " + got[i];
  return {};
}

}  // namespace golden
