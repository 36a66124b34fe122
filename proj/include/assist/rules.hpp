#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "assist/trie.hpp"

namespace assist {

enum class RuleKind { kNoRule, kAssist, kPromo, kHuman };

std::string_view rule_kind_name(RuleKind kind);

struct RulePayload {
  RuleKind kind = RuleKind::kNoRule;
  std::string target;  // task id for Assist, answer id for Promo
  std::size_t order = 0;  // registration order in the pattern file

  friend bool operator==(const RulePayload&, const RulePayload&) = default;
};

using RuleTrie = PatternTrie<RulePayload>;

struct RuleDecision {
  RuleKind kind = RuleKind::kNoRule;
  std::string target;
  std::vector<Match<RulePayload>> matched;
};

/// Compiles rule patterns; payload_kind must be one of assist, promo, human.
RuleTrie compile_rules(std::span<const PatternSpec> specs);
RuleTrie load_rules(const std::filesystem::path& path);

/// Picks one outcome from all pattern hits: Human > Assist > Promo, then the
/// earliest match start, then registration order. NoRule when nothing hits.
RuleDecision route_by_rules(std::span<const std::string> tokens, const RuleTrie& trie);

}  // namespace assist
