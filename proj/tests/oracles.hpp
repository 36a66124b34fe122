#pragma once
// Independent brute-force references shared by the unit and acceptance tests.

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "assist/chat_engine.hpp"
#include "assist/intent_cnn.hpp"
#include "assist/kg_construction.hpp"
#include "assist/knowledge_graph.hpp"
#include "assist/trie.hpp"

namespace oracle {

using namespace assist;

// Enumerates every (start, pattern) pair, keeps the longest pattern at the
// leftmost free position, and collects all payloads of that pattern in
// registration order.
inline std::vector<Match<std::string>> naive_scan(const std::vector<PatternTrie<std::string>::Pattern>& patterns,
                                                  const std::vector<std::string>& text) {
  std::vector<Match<std::string>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best_len = 0;
    for (const auto& [seq, payload] : patterns) {
      if (pos + seq.size() > text.size()) continue;
      if (std::equal(seq.begin(), seq.end(), text.begin() + static_cast<long>(pos)))
        best_len = std::max(best_len, seq.size());
    }
    if (best_len == 0) {
      ++pos;
      continue;
    }
    Match<std::string> m{pos, pos + best_len, {}};
    for (const auto& [seq, payload] : patterns) {
      if (seq.size() == best_len &&
          std::equal(seq.begin(), seq.end(), text.begin() + static_cast<long>(pos)) &&
          std::find(m.payloads.begin(), m.payloads.end(), payload) == m.payloads.end())
        m.payloads.push_back(payload);
    }
    out.push_back(m);
    pos += best_len;
  }
  return out;
}

// Walks every upward is_a path of length <= 2 from each tagged node, tries
// every combination whose lengths sum to <= 2, and keeps the cheapest
// (total length, item id) whose attached set equals the combination.
inline std::optional<std::string> brute_force(const std::vector<GraphNode>& nodes,
                                       const std::vector<GraphEdge>& edges,
                                       const std::vector<KnowledgeItem>& items,
                                       const std::vector<std::string>& tagged) {
  std::vector<std::vector<std::pair<std::string, int>>> reach(tagged.size());
  std::function<void(std::size_t, const std::string&, int)> walk = [&](std::size_t i, const std::string& at, int len) {
    reach[i].emplace_back(at, len);
    if (len == 2) return;
    for (const auto& e : edges)
      if (e.rel == Relation::kIsA && e.src == at) walk(i, e.dst, len + 1);
  };
  for (std::size_t i = 0; i < tagged.size(); ++i) walk(i, tagged[i], 0);

  std::optional<std::pair<int, std::string>> best;
  std::vector<std::string> chosen(tagged.size());
  std::function<void(std::size_t, int)> combine = [&](std::size_t i, int cost) {
    if (cost > 2) return;
    if (i == tagged.size()) {
      std::set<std::string> s(chosen.begin(), chosen.end());
      for (const auto& item : items) {
        if (item.node_ids != s) continue;
        std::pair<int, std::string> cand{cost, item.id};
        if (!best || cand < *best) best = cand;
      }
      return;
    }
    for (const auto& [node, len] : reach[i]) {
      chosen[i] = node;
      combine(i + 1, cost + len);
    }
  };
  combine(0, 0);
  (void)nodes;
  if (!best) return std::nullopt;
  return best->second;
}

// Brute force: enumerate every subset of the universe.
inline std::vector<Itemset> power_set(const std::vector<std::set<std::string>>& tx, double minsup) {
  std::set<std::string> uni;
  for (const auto& t : tx) uni.insert(t.begin(), t.end());
  const std::vector<std::string> items(uni.begin(), uni.end());
  std::vector<Itemset> out;
  for (std::uint32_t mask = 1; mask < (1u << items.size()); ++mask) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (mask & (1u << i)) s.push_back(items[i]);
    std::int64_t c = 0;
    for (const auto& t : tx) {
      bool all = true;
      for (const auto& x : s) all = all && t.count(x);
      c += all;
    }
    if (meets_support(c, tx.size(), minsup))
      out.push_back({s, c, static_cast<double>(c) / static_cast<double>(tx.size())});
  }
  std::sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    return a.items.size() != b.items.size() ? a.items.size() < b.items.size() : a.items < b.items;
  });
  return out;
}

// Tiny random model for gradient checks. Larger embeddings than the default
// init keep activations away from the ReLU kink at zero.
inline IntentModel random_tiny(std::uint64_t seed) {
  IntentConfig cfg;
  cfg.dim = 4;
  cfg.windows = {2, 3};
  cfg.filters = 3;
  cfg.max_len = 6;
  cfg.seed = seed;
  IntentModel m = IntentModel::init(cfg, 10, 3);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Eigen::Index i = 0; i < m.embedding.size(); ++i) m.embedding.data()[i] = u(rng);
  for (auto& b : m.filter_bias) b.setConstant(0.3);
  return m;
}

// n arbitrary post/reply pairs for memorization.
inline std::vector<ChatPair> toy_corpus(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ChatPair> out;
  for (int i = 0; i < n; ++i) {
    std::string post = "p" + std::to_string(i);
    std::string reply;
    const int plen = 2 + static_cast<int>(rng() % 3);
    const int rlen = 2 + static_cast<int>(rng() % 4);
    for (int w = 0; w < plen; ++w) post += " a" + std::to_string(rng() % 30);
    for (int w = 0; w < rlen; ++w) reply += (w ? " b" : "b") + std::to_string(rng() % 40);
    out.push_back({post, reply});
  }
  return out;
}

// Tiny chat model with weights large enough to exercise every gradient term.
inline Seq2SeqModel tiny_model(std::uint64_t seed) {
  Vocabulary src = Seq2SeqModel::make_src_vocab();
  Vocabulary tgt = Seq2SeqModel::make_tgt_vocab();
  for (const char* w : {"x", "y", "z"}) src.add(w);
  for (const char* w : {"u", "v", "w"}) tgt.add(w);
  Seq2SeqConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 8;
  cfg.seed = seed;
  auto m = Seq2SeqModel::init(cfg, src, tgt);
  // Larger weights make every term of the gradient visible.
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> dist(-0.6, 0.6);
  for (auto& g : m.parameter_groups())
    for (std::size_t i = 0; i < g.size; ++i) g.data[i] = dist(rng);
  return m;
}

}  // namespace oracle
