#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "assist/error.hpp"

namespace assist {

/// A pattern hit over a token sequence. All payloads registered for the
/// matched pattern are reported, in registration order.
template <typename P>
struct Match {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::vector<P> payloads;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Token-level prefix tree with payloads on terminal nodes. Immutable once
/// compiled; rebuild to change the pattern set.
template <typename P>
class PatternTrie {
 public:
  using Pattern = std::pair<std::vector<std::string>, P>;

  PatternTrie() : nodes_(1) {}

  /// Builds a trie from (token sequence, payload) pairs. Duplicate pairs are
  /// stored once; a pattern may carry several distinct payloads.
  static PatternTrie compile(std::span<const Pattern> patterns) {
    PatternTrie trie;
    for (const auto& [seq, payload] : patterns) {
      if (seq.empty()) throw Error(Errc::kEmptyPattern, "pattern token sequence is empty");
      std::int32_t node = 0;
      for (const auto& token : seq) {
        auto it = trie.nodes_[node].children.find(token);
        if (it == trie.nodes_[node].children.end()) {
          const auto child = static_cast<std::int32_t>(trie.nodes_.size());
          trie.nodes_[node].children.emplace(token, child);
          trie.nodes_.emplace_back();
          node = child;
        } else {
          node = it->second;
        }
      }
      auto& terminal = trie.nodes_[node].payloads;
      if (std::find(terminal.begin(), terminal.end(), payload) == terminal.end())
        terminal.push_back(payload);
      trie.max_depth_ = std::max(trie.max_depth_, seq.size());
    }
    return trie;
  }

  static PatternTrie compile(const std::vector<Pattern>& patterns) {
    return compile(std::span<const Pattern>(patterns));
  }

  /// Leftmost-longest, non-overlapping scan. At each position the longest
  /// pattern starting there wins and scanning resumes at its end.
  std::vector<Match<P>> find_matches(std::span<const std::string> tokens) const {
    std::vector<Match<P>> out;
    std::size_t pos = 0;
    while (pos < tokens.size()) {
      std::int32_t node = 0;
      std::int32_t best_node = -1;
      std::size_t best_end = pos;
      for (std::size_t i = pos; i < tokens.size(); ++i) {
        const auto& children = nodes_[node].children;
        auto it = children.find(tokens[i]);
        if (it == children.end()) break;
        node = it->second;
        if (!nodes_[node].payloads.empty()) {
          best_node = node;
          best_end = i + 1;
        }
      }
      if (best_node >= 0) {
        out.push_back(Match<P>{pos, best_end, nodes_[best_node].payloads});
        pos = best_end;
      } else {
        ++pos;
      }
    }
    return out;
  }

  std::vector<Match<P>> find_matches(const std::vector<std::string>& tokens) const {
    return find_matches(std::span<const std::string>(tokens));
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t max_depth() const { return max_depth_; }

  /// Payloads stored exactly at the end of `seq`, or empty.
  std::vector<P> payloads_at(std::span<const std::string> seq) const {
    std::int32_t node = 0;
    for (const auto& token : seq) {
      auto it = nodes_[node].children.find(token);
      if (it == nodes_[node].children.end()) return {};
      node = it->second;
    }
    return nodes_[node].payloads;
  }

 private:
  struct Node {
    std::map<std::string, std::int32_t> children;
    std::vector<P> payloads;
  };

  std::vector<Node> nodes_;
  std::size_t max_depth_ = 0;
};

/// One line of a pattern file: `pattern<TAB>payload_kind<TAB>payload_value`.
struct PatternSpec {
  std::string pattern;
  std::string kind;
  std::string value;
  std::size_t line = 0;
};

std::vector<PatternSpec> parse_pattern_file(const std::string& text, const std::string& origin);
std::vector<PatternSpec> load_pattern_file(const std::filesystem::path& path);
std::string format_pattern_file(std::span<const PatternSpec> specs);

}  // namespace assist
