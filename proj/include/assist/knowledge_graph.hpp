#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "assist/trie.hpp"

namespace assist {

enum class NodeKind { kEntity, kAction };
enum class Relation { kIsA, kRefines, kAbout };

std::string_view node_kind_name(NodeKind kind);
std::string_view relation_name(Relation rel);

struct GraphNode {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::kEntity;
  std::vector<std::string> patterns;  // wording patterns, plain text
};

/// `is_a` points from child to parent.
struct GraphEdge {
  std::string src;
  std::string dst;
  Relation rel = Relation::kIsA;
};

struct KnowledgeItem {
  std::string id;
  std::set<std::string> node_ids;
  std::string answer;
};

struct SemanticTag {
  std::string node_id;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SemanticTag&, const SemanticTag&) = default;
};

struct GraphAnswer {
  const KnowledgeItem* item = nullptr;
  int hops = 0;                         // 0 for an exact match
  std::set<std::string> matched_nodes;  // node set the item is attached to
};

/// In-memory hierarchy of entities and actions with attached knowledge items.
/// Immutable after construction; the semantic-parser trie is compiled once.
class KnowledgeGraph {
 public:
  static constexpr int kMaxHops = 2;

  KnowledgeGraph() = default;
  /// Validates ids, references and is_a acyclicity.
  KnowledgeGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges,
                 std::vector<KnowledgeItem> items);

  /// Nodes, edges and items files: one JSON record per line with fields
  /// {id, label, kind, patterns[]}, {src, dst, rel}, {id, node_ids[], answer}.
  static KnowledgeGraph load(const std::filesystem::path& nodes,
                             const std::filesystem::path& edges,
                             const std::filesystem::path& items);

  /// Leftmost-longest tagging of a normalized question. A pattern shared by
  /// several nodes yields one tag per node.
  std::vector<SemanticTag> parse_semantic_tags(const std::string& normalized) const;

  /// Exact node-set match first, then breadth-first generalization over
  /// is_a ancestors with at most two substitution hops in total. Ties go to
  /// the smallest item id. Throws kEmptyTags on an empty tag list.
  std::optional<GraphAnswer> answer_by_graph(const std::vector<SemanticTag>& tags) const;

  const GraphNode* node(std::string_view id) const;
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<KnowledgeItem>& items() const { return items_; }
  /// Direct is_a parents.
  const std::vector<std::string>& parents(const std::string& id) const;
  /// Shortest is_a distance to every ancestor within `max_hops` (self at 0).
  std::map<std::string, int> ancestors(const std::string& id, int max_hops) const;
  /// Items attached to exactly this node set, sorted by id.
  std::vector<const KnowledgeItem*> items_for(const std::set<std::string>& nodes) const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<KnowledgeItem> items_;
  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::map<std::string, std::vector<std::string>> parents_;
  std::map<std::set<std::string>, std::vector<std::size_t>> items_by_set_;
  PatternTrie<std::string> parser_;
};

std::vector<std::string> distinct_nodes(const std::vector<SemanticTag>& tags);

}  // namespace assist
