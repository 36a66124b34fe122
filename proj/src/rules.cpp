#include "assist/rules.hpp"

#include <tuple>

#include "assist/text.hpp"

namespace assist {

std::string_view rule_kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::kAssist: return "assist";
    case RuleKind::kPromo: return "promo";
    case RuleKind::kHuman: return "human";
    case RuleKind::kNoRule: break;
  }
  return "no_rule";
}

RuleTrie compile_rules(std::span<const PatternSpec> specs) {
  std::vector<RuleTrie::Pattern> patterns;
  patterns.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    RulePayload payload;
    if (s.kind == "assist") {
      payload.kind = RuleKind::kAssist;
    } else if (s.kind == "promo") {
      payload.kind = RuleKind::kPromo;
    } else if (s.kind == "human") {
      payload.kind = RuleKind::kHuman;
    } else {
      throw Error(Errc::kMalformedFile,
                  "rule line " + std::to_string(s.line) + ": unknown payload kind '" + s.kind + "'");
    }
    payload.target = s.value;
    payload.order = i;
    patterns.emplace_back(tokenize(normalize(s.pattern)), std::move(payload));
  }
  return RuleTrie::compile(patterns);
}

RuleTrie load_rules(const std::filesystem::path& path) {
  return compile_rules(load_pattern_file(path));
}

namespace {

int priority(RuleKind kind) {
  switch (kind) {
    case RuleKind::kHuman: return 0;
    case RuleKind::kAssist: return 1;
    case RuleKind::kPromo: return 2;
    case RuleKind::kNoRule: break;
  }
  return 3;
}

}  // namespace

RuleDecision route_by_rules(std::span<const std::string> tokens, const RuleTrie& trie) {
  RuleDecision decision;
  decision.matched = trie.find_matches(tokens);
  const RulePayload* best = nullptr;
  std::size_t best_start = 0;
  for (const auto& m : decision.matched) {
    for (const auto& p : m.payloads) {
      if (best == nullptr ||
          std::tuple(priority(p.kind), m.start, p.order) <
              std::tuple(priority(best->kind), best_start, best->order)) {
        best = &p;
        best_start = m.start;
      }
    }
  }
  if (best != nullptr) {
    decision.kind = best->kind;
    decision.target = best->target;
  }
  return decision;
}

}  // namespace assist
