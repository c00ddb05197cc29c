#ifndef MIXSEM_GRAPH_HPP
#define MIXSEM_GRAPH_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mixsem {

/// Index into the node-name table of the owning graph.
using NodeId = int;

/// Canonical or labeled base-8 pair-state encoding of a graph.
using GraphCode = std::uint64_t;

inline constexpr int kMaxNodes = 6;

struct DirectedEdge {
  NodeId tail;
  NodeId head;
  auto operator<=>(const DirectedEdge&) const = default;
};

/// Stored with a < b.
struct BidirectedEdge {
  NodeId a;
  NodeId b;
  auto operator<=>(const BidirectedEdge&) const = default;
};

/// Names one edge of a graph, e.g. for deletion.
struct EdgeRef {
  enum class Kind { Directed, Bidirected };
  Kind kind;
  NodeId u;
  NodeId v;
  auto operator<=>(const EdgeRef&) const = default;

  static EdgeRef directed(NodeId tail, NodeId head) { return {Kind::Directed, tail, head}; }
  static EdgeRef bidirected(NodeId x, NodeId y) {
    return {Kind::Bidirected, std::min(x, y), std::max(x, y)};
  }
};

/// A mixed graph G = (V, D, B). Nodes carry names; edges are kept sorted.
/// Self-loops and duplicate edges are rejected on insertion.
class MixedGraph {
 public:
  MixedGraph() = default;
  /// Nodes named a, b, c, ...
  explicit MixedGraph(int n);
  explicit MixedGraph(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(NodeId v) const { return names_.at(static_cast<std::size_t>(v)); }
  /// Index of a node name, or -1.
  NodeId find(const std::string& name) const;

  void add_directed(NodeId tail, NodeId head);
  void add_bidirected(NodeId x, NodeId y);

  bool has_directed(NodeId tail, NodeId head) const {
    return (pa_[static_cast<std::size_t>(head)] >> tail) & 1u;
  }
  bool has_bidirected(NodeId x, NodeId y) const {
    return (sib_[static_cast<std::size_t>(x)] >> y) & 1u;
  }
  bool adjacent(NodeId x, NodeId y) const {
    return has_directed(x, y) || has_directed(y, x) || has_bidirected(x, y);
  }

  const std::vector<DirectedEdge>& directed() const { return directed_; }
  const std::vector<BidirectedEdge>& bidirected() const { return bidirected_; }
  int edge_count() const { return static_cast<int>(directed_.size() + bidirected_.size()); }
  /// Directed edges first (sorted), then bidirected edges (sorted).
  std::vector<EdgeRef> edges() const;

  /// Bitmasks over node indices.
  std::uint32_t parent_mask(NodeId v) const { return pa_[static_cast<std::size_t>(v)]; }
  std::uint32_t child_mask(NodeId v) const { return ch_[static_cast<std::size_t>(v)]; }
  std::uint32_t sibling_mask(NodeId v) const { return sib_[static_cast<std::size_t>(v)]; }

  std::vector<NodeId> parents(NodeId v) const;
  std::vector<NodeId> children(NodeId v) const;
  std::vector<NodeId> siblings(NodeId v) const;

  bool operator==(const MixedGraph& other) const {
    return names_ == other.names_ && directed_ == other.directed_ &&
           bidirected_ == other.bidirected_;
  }

 private:
  void check_node(NodeId v) const;

  std::vector<std::string> names_;
  std::vector<DirectedEdge> directed_;
  std::vector<BidirectedEdge> bidirected_;
  std::vector<std::uint32_t> pa_, ch_, sib_;
};

std::vector<NodeId> mask_to_nodes(std::uint32_t mask);

/// Undirected adjacency structure of a mixed graph.
struct Skeleton {
  int n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;  // sorted, first < second

  bool contains(NodeId x, NodeId y) const;
  bool subset_of(const Skeleton& other) const;
  bool operator==(const Skeleton&) const = default;
};

Skeleton skeleton(const MixedGraph& g);

enum class ColliderType { NotCollider, Partial, Full };

/// Classifies the skeleton path (v1, v2, v3). Throws std::invalid_argument
/// unless the nodes are distinct and both pairs are adjacent.
ColliderType collider_type(const MixedGraph& g, NodeId v1, NodeId v2, NodeId v3);

struct StructureFlags {
  bool is_acyclic = true;
  bool is_bow_free = true;
  bool has_bow = false;
  bool is_dag = true;
};

StructureFlags structure_predicates(const MixedGraph& g);
bool is_acyclic(const MixedGraph& g);

/// Nodes reachable from v by a nonempty directed path.
std::uint32_t descendant_mask(const MixedGraph& g, NodeId v);

/// Topological order of the directed part; empty if cyclic.
std::vector<NodeId> topological_order(const MixedGraph& g);

/// Removes exactly the given edges. Throws std::invalid_argument for an edge
/// not present in g.
MixedGraph delete_edges(const MixedGraph& g, std::span<const EdgeRef> edges);

/// Node v of g becomes node perm[v] of the result; names are kept in place.
MixedGraph relabel(const MixedGraph& g, std::span<const NodeId> perm);

// Pair-state encoding: one base-8 digit per unordered pair (v < w), pairs in
// lexicographic order with the first pair most significant.
namespace pair_state {
inline constexpr int kNone = 0;
inline constexpr int kForward = 1;       // v -> w
inline constexpr int kBackward = 2;      // w -> v
inline constexpr int kBidirected = 3;    // v <-> w
inline constexpr int kForwardBow = 4;    // v -> w and v <-> w
inline constexpr int kBackwardBow = 5;   // w -> v and v <-> w
}  // namespace pair_state

int pair_count(int n);
GraphCode encode(const MixedGraph& g);
/// Throws DataError on digits 6 or 7, or when the code has too many digits.
MixedGraph decode(GraphCode code, int n);
MixedGraph decode(GraphCode code, std::vector<std::string> names);

/// Minimum encoding over all node permutations. Intended for n <= 6.
GraphCode canonical_code(const MixedGraph& g);

/// Number of labeled DAGs on n nodes (Robinson's recurrence).
std::uint64_t count_labeled_dags(int n);
/// Number of acyclic mixed graphs on n labeled nodes, without enumeration.
std::uint64_t count_acyclic(int n);

/// Streams every acyclic mixed graph on n labeled nodes in increasing code
/// order. 1 <= n <= 6, otherwise std::invalid_argument.
void for_each_acyclic(int n, const std::function<void(GraphCode)>& visit);
std::vector<GraphCode> enumerate_acyclic(int n);

}  // namespace mixsem

#endif  // MIXSEM_GRAPH_HPP
