#include "assist/knowledge_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "assist/error.hpp"
#include "assist/io.hpp"
#include "assist/text.hpp"

namespace assist {

std::string_view node_kind_name(NodeKind kind) {
  return kind == NodeKind::kAction ? "action" : "entity";
}

std::string_view relation_name(Relation rel) {
  switch (rel) {
    case Relation::kIsA: return "is_a";
    case Relation::kRefines: return "refines";
    case Relation::kAbout: return "about";
  }
  return "is_a";
}

namespace {

const std::vector<std::string> kNoParents;

Relation parse_relation(const std::string& s) {
  if (s == "is_a") return Relation::kIsA;
  if (s == "refines") return Relation::kRefines;
  if (s == "about") return Relation::kAbout;
  throw Error(Errc::kMalformedFile, "unknown relation '" + s + "'");
}

NodeKind parse_kind(const std::string& s) {
  if (s == "entity") return NodeKind::kEntity;
  if (s == "action") return NodeKind::kAction;
  throw Error(Errc::kMalformedFile, "unknown node kind '" + s + "'");
}

template <typename Fn>
auto wrap_record(const std::string& origin, Fn&& fn) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::kMalformedFile, origin + ": " + e.what());
  }
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges,
                               std::vector<KnowledgeItem> items)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), items_(std::move(items)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.empty() || nodes_[i].label.empty())
      throw Error(Errc::kMalformedFile, "node needs an id and a label");
    if (!node_index_.emplace(nodes_[i].id, i).second)
      throw Error(Errc::kDuplicateId, "node " + nodes_[i].id);
  }
  for (const auto& e : edges_) {
    if (!node_index_.count(e.src) || !node_index_.count(e.dst))
      throw Error(Errc::kDanglingReference, "edge " + e.src + " -> " + e.dst);
    if (e.rel == Relation::kIsA) {
      auto& ps = parents_[e.src];
      if (std::find(ps.begin(), ps.end(), e.dst) == ps.end()) ps.push_back(e.dst);
    }
  }
  for (auto& [_, ps] : parents_) std::sort(ps.begin(), ps.end());

  // Three-colour DFS over is_a edges.
  std::map<std::string, int> colour;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    colour[id] = 1;
    for (const auto& p : parents(id)) {
      if (colour[p] == 1) throw Error(Errc::kCycleDetected, "is_a cycle through " + p);
      if (colour[p] == 0) visit(p);
    }
    colour[id] = 2;
  };
  for (const auto& n : nodes_)
    if (colour[n.id] == 0) visit(n.id);

  std::set<std::string> item_ids;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (!item_ids.insert(item.id).second) throw Error(Errc::kDuplicateId, "item " + item.id);
    if (item.node_ids.empty() || item.answer.empty())
      throw Error(Errc::kMalformedFile, "item " + item.id + " needs nodes and an answer");
    for (const auto& n : item.node_ids) {
      if (!node_index_.count(n))
        throw Error(Errc::kDanglingReference, "item " + item.id + " -> " + n);
    }
    items_by_set_[item.node_ids].push_back(i);
  }
  for (auto& [_, list] : items_by_set_) {
    std::sort(list.begin(), list.end(),
              [&](std::size_t a, std::size_t b) { return items_[a].id < items_[b].id; });
  }

  std::vector<PatternTrie<std::string>::Pattern> patterns;
  for (const auto& n : nodes_) {
    for (const auto& p : n.patterns) {
      auto tokens = tokenize(normalize(p));
      if (!tokens.empty()) patterns.emplace_back(std::move(tokens), n.id);
    }
  }
  parser_ = PatternTrie<std::string>::compile(patterns);
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& nodes_path,
                                    const std::filesystem::path& edges_path,
                                    const std::filesystem::path& items_path) {
  std::vector<GraphNode> nodes;
  for (const auto& r : read_jsonl(nodes_path)) {
    nodes.push_back(wrap_record(nodes_path.string(), [&] {
      GraphNode n;
      n.id = r.at("id").get<std::string>();
      n.label = r.value("label", n.id);
      n.kind = parse_kind(r.value("kind", std::string("entity")));
      n.patterns = r.value("patterns", std::vector<std::string>{});
      return n;
    }));
  }
  std::vector<GraphEdge> edges;
  for (const auto& r : read_jsonl(edges_path)) {
    edges.push_back(wrap_record(edges_path.string(), [&] {
      return GraphEdge{r.at("src").get<std::string>(), r.at("dst").get<std::string>(),
                       parse_relation(r.value("rel", std::string("is_a")))};
    }));
  }
  std::vector<KnowledgeItem> items;
  for (const auto& r : read_jsonl(items_path)) {
    items.push_back(wrap_record(items_path.string(), [&] {
      const auto ids = r.at("node_ids").get<std::vector<std::string>>();
      return KnowledgeItem{r.at("id").get<std::string>(), {ids.begin(), ids.end()},
                           r.at("answer").get<std::string>()};
    }));
  }
  return KnowledgeGraph(std::move(nodes), std::move(edges), std::move(items));
}

std::vector<SemanticTag> KnowledgeGraph::parse_semantic_tags(const std::string& normalized) const {
  std::vector<SemanticTag> tags;
  for (const auto& m : parser_.find_matches(tokenize(normalized))) {
    for (const auto& id : m.payloads) tags.push_back({id, m.start, m.end});
  }
  return tags;
}

const GraphNode* KnowledgeGraph::node(std::string_view id) const {
  auto it = node_index_.find(id);
  return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const std::vector<std::string>& KnowledgeGraph::parents(const std::string& id) const {
  auto it = parents_.find(id);
  return it == parents_.end() ? kNoParents : it->second;
}

std::map<std::string, int> KnowledgeGraph::ancestors(const std::string& id, int max_hops) const {
  std::map<std::string, int> dist{{id, 0}};
  std::deque<std::string> queue{id};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    const int d = dist[cur];
    if (d == max_hops) continue;
    for (const auto& p : parents(cur)) {
      if (dist.emplace(p, d + 1).second) queue.push_back(p);
    }
  }
  return dist;
}

std::vector<const KnowledgeItem*> KnowledgeGraph::items_for(const std::set<std::string>& nodes) const {
  std::vector<const KnowledgeItem*> out;
  if (auto it = items_by_set_.find(nodes); it != items_by_set_.end()) {
    for (auto i : it->second) out.push_back(&items_[i]);
  }
  return out;
}

std::vector<std::string> distinct_nodes(const std::vector<SemanticTag>& tags) {
  std::set<std::string> ids;
  for (const auto& t : tags) ids.insert(t.node_id);
  return {ids.begin(), ids.end()};
}

std::optional<GraphAnswer> KnowledgeGraph::answer_by_graph(const std::vector<SemanticTag>& tags) const {
  if (tags.empty()) throw Error(Errc::kEmptyTags, "no semantic tags");
  const std::vector<std::string> base = distinct_nodes(tags);

  // Per tagged node: ancestors grouped by hop distance.
  std::vector<std::vector<std::vector<std::string>>> by_hop(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    by_hop[i].resize(kMaxHops + 1);
    for (const auto& [anc, d] : ancestors(base[i], kMaxHops)) by_hop[i][d].push_back(anc);
  }

  for (int total = 0; total <= kMaxHops; ++total) {
    const KnowledgeItem* best = nullptr;
    std::set<std::string> best_set;
    // Enumerate every split of `total` hops over the tagged nodes.
    std::vector<int> hops(base.size(), 0);
    std::function<void(std::size_t, int)> split = [&](std::size_t i, int left) {
      if (i == base.size()) {
        if (left != 0) return;
        std::vector<std::size_t> choice(base.size(), 0);
        std::function<void(std::size_t, std::set<std::string>&)> pick =
            [&](std::size_t k, std::set<std::string>& acc) {
              if (k == base.size()) {
                for (const KnowledgeItem* item : items_for(acc)) {
                  if (best == nullptr || item->id < best->id) {
                    best = item;
                    best_set = acc;
                  }
                }
                return;
              }
              for (const auto& anc : by_hop[k][hops[k]]) {
                const bool fresh = acc.insert(anc).second;
                pick(k + 1, acc);
                if (fresh) acc.erase(anc);
              }
            };
        std::set<std::string> acc;
        pick(0, acc);
        return;
      }
      for (int h = 0; h <= left; ++h) {
        hops[i] = h;
        split(i + 1, left - h);
      }
      hops[i] = 0;
    };
    split(0, total);
    if (best != nullptr) return GraphAnswer{best, total, best_set};
  }
  return std::nullopt;
}

}  // namespace assist
