#include "mixsem/graph.hpp"

#include "mixsem/scalar.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace mixsem {

namespace {

std::vector<std::string> default_names(int n) {
  if (n < 0 || n > 26) throw std::invalid_argument("node count out of range");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  return names;
}

}  // namespace

MixedGraph::MixedGraph(int n) : MixedGraph(default_names(n)) {}

MixedGraph::MixedGraph(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > 32) throw std::invalid_argument("at most 32 nodes are supported");
  pa_.assign(names_.size(), 0);
  ch_.assign(names_.size(), 0);
  sib_.assign(names_.size(), 0);
}

NodeId MixedGraph::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<NodeId>(it - names_.begin());
}

void MixedGraph::check_node(NodeId v) const {
  if (v < 0 || v >= size()) throw std::out_of_range("node index out of range");
}

void MixedGraph::add_directed(NodeId tail, NodeId head) {
  check_node(tail);
  check_node(head);
  if (tail == head) throw std::invalid_argument("self-loop " + name(tail) + " -> " + name(head));
  if (has_directed(tail, head)) {
    throw std::invalid_argument("duplicate edge " + name(tail) + " -> " + name(head));
  }
  DirectedEdge e{tail, head};
  directed_.insert(std::lower_bound(directed_.begin(), directed_.end(), e), e);
  pa_[static_cast<std::size_t>(head)] |= 1u << tail;
  ch_[static_cast<std::size_t>(tail)] |= 1u << head;
}

void MixedGraph::add_bidirected(NodeId x, NodeId y) {
  check_node(x);
  check_node(y);
  if (x == y) throw std::invalid_argument("self-loop " + name(x) + " <-> " + name(y));
  if (has_bidirected(x, y)) {
    throw std::invalid_argument("duplicate edge " + name(x) + " <-> " + name(y));
  }
  BidirectedEdge e{std::min(x, y), std::max(x, y)};
  bidirected_.insert(std::lower_bound(bidirected_.begin(), bidirected_.end(), e), e);
  sib_[static_cast<std::size_t>(x)] |= 1u << y;
  sib_[static_cast<std::size_t>(y)] |= 1u << x;
}

std::vector<EdgeRef> MixedGraph::edges() const {
  std::vector<EdgeRef> out;
  out.reserve(directed_.size() + bidirected_.size());
  for (const auto& e : directed_) out.push_back(EdgeRef::directed(e.tail, e.head));
  for (const auto& e : bidirected_) out.push_back(EdgeRef::bidirected(e.a, e.b));
  return out;
}

std::vector<NodeId> mask_to_nodes(std::uint32_t mask) {
  std::vector<NodeId> out;
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

std::vector<NodeId> MixedGraph::parents(NodeId v) const { return mask_to_nodes(parent_mask(v)); }
std::vector<NodeId> MixedGraph::children(NodeId v) const { return mask_to_nodes(child_mask(v)); }
std::vector<NodeId> MixedGraph::siblings(NodeId v) const { return mask_to_nodes(sibling_mask(v)); }

bool Skeleton::contains(NodeId x, NodeId y) const {
  const auto key = std::minmax(x, y);
  return std::binary_search(edges.begin(), edges.end(), std::pair<NodeId, NodeId>(key));
}

bool Skeleton::subset_of(const Skeleton& other) const {
  return std::includes(other.edges.begin(), other.edges.end(), edges.begin(), edges.end());
}

Skeleton skeleton(const MixedGraph& g) {
  Skeleton s;
  s.n = g.size();
  for (NodeId v = 0; v < g.size(); ++v) {
    for (NodeId w = v + 1; w < g.size(); ++w) {
      if (g.adjacent(v, w)) s.edges.emplace_back(v, w);
    }
  }
  return s;
}

ColliderType collider_type(const MixedGraph& g, NodeId v1, NodeId v2, NodeId v3) {
  const int n = g.size();
  for (NodeId v : {v1, v2, v3}) {
    if (v < 0 || v >= n) throw std::invalid_argument("collider_type: node out of range");
  }
  if (v1 == v2 || v2 == v3 || v1 == v3) {
    throw std::invalid_argument("collider_type: nodes must be distinct");
  }
  if (!g.adjacent(v1, v2) || !g.adjacent(v2, v3)) {
    throw std::invalid_argument("collider_type: path is not in the skeleton");
  }
  auto head_at_middle = [&](NodeId end) {
    return g.has_directed(end, v2) || g.has_bidirected(end, v2);
  };
  if (!head_at_middle(v1) || !head_at_middle(v3)) return ColliderType::NotCollider;
  if (g.has_directed(v2, v1) || g.has_directed(v2, v3)) return ColliderType::Partial;
  return ColliderType::Full;
}

std::uint32_t descendant_mask(const MixedGraph& g, NodeId v) {
  std::uint32_t seen = 0;
  std::uint32_t frontier = g.child_mask(v);
  while (frontier != 0) {
    seen |= frontier;
    std::uint32_t next = 0;
    for (NodeId w : mask_to_nodes(frontier)) next |= g.child_mask(w);
    frontier = next & ~seen;
  }
  return seen;
}

std::vector<NodeId> topological_order(const MixedGraph& g) {
  const int n = g.size();
  std::vector<int> indegree(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) indegree[static_cast<std::size_t>(v)] = std::popcount(g.parent_mask(v));
  std::vector<NodeId> order;
  order.reserve(static_cast<std::size_t>(n));
  std::uint32_t done = 0;
  while (static_cast<int>(order.size()) < n) {
    NodeId pick = -1;
    for (NodeId v = 0; v < n; ++v) {
      if (!((done >> v) & 1u) && indegree[static_cast<std::size_t>(v)] == 0) {
        pick = v;
        break;
      }
    }
    if (pick < 0) return {};
    done |= 1u << pick;
    order.push_back(pick);
    for (NodeId c : g.children(pick)) --indegree[static_cast<std::size_t>(c)];
  }
  return order;
}

bool is_acyclic(const MixedGraph& g) { return g.size() == 0 || !topological_order(g).empty(); }

StructureFlags structure_predicates(const MixedGraph& g) {
  StructureFlags f;
  f.is_acyclic = is_acyclic(g);
  for (const auto& e : g.bidirected()) {
    if (g.has_directed(e.a, e.b) || g.has_directed(e.b, e.a)) f.has_bow = true;
  }
  f.is_bow_free = !f.has_bow;
  f.is_dag = f.is_acyclic && g.bidirected().empty();
  return f;
}

MixedGraph delete_edges(const MixedGraph& g, std::span<const EdgeRef> edges) {
  std::vector<EdgeRef> remove(edges.begin(), edges.end());
  for (auto& e : remove) {
    if (e.kind == EdgeRef::Kind::Bidirected) e = EdgeRef::bidirected(e.u, e.v);
    const bool present = e.kind == EdgeRef::Kind::Directed
                             ? (e.u >= 0 && e.u < g.size() && e.v >= 0 && e.v < g.size() &&
                                g.has_directed(e.u, e.v))
                             : (e.u >= 0 && e.v < g.size() && e.u != e.v && g.has_bidirected(e.u, e.v));
    if (!present) throw std::invalid_argument("delete_edges: unknown edge");
  }
  std::sort(remove.begin(), remove.end());
  MixedGraph out(g.names());
  for (const auto& e : g.edges()) {
    if (std::binary_search(remove.begin(), remove.end(), e)) continue;
    if (e.kind == EdgeRef::Kind::Directed) {
      out.add_directed(e.u, e.v);
    } else {
      out.add_bidirected(e.u, e.v);
    }
  }
  return out;
}

MixedGraph relabel(const MixedGraph& g, std::span<const NodeId> perm) {
  if (static_cast<int>(perm.size()) != g.size()) throw std::invalid_argument("relabel: bad permutation");
  MixedGraph out(g.names());
  for (const auto& e : g.directed()) {
    out.add_directed(perm[static_cast<std::size_t>(e.tail)], perm[static_cast<std::size_t>(e.head)]);
  }
  for (const auto& e : g.bidirected()) {
    out.add_bidirected(perm[static_cast<std::size_t>(e.a)], perm[static_cast<std::size_t>(e.b)]);
  }
  return out;
}

int pair_count(int n) { return n * (n - 1) / 2; }

namespace {

int pair_digit(bool forward, bool backward, bool bidirected) {
  using namespace pair_state;
  if (forward && backward) throw std::invalid_argument("encode: two-cycle cannot be encoded");
  if (forward) return bidirected ? kForwardBow : kForward;
  if (backward) return bidirected ? kBackwardBow : kBackward;
  return bidirected ? kBidirected : kNone;
}

// Encodes the graph seen through `inv`: new node i is old node inv[i].
GraphCode encode_permuted(const MixedGraph& g, const std::array<NodeId, kMaxNodes>& inv) {
  const int n = g.size();
  GraphCode code = 0;
  for (NodeId i = 0; i < n; ++i) {
    const NodeId oi = inv[static_cast<std::size_t>(i)];
    for (NodeId j = i + 1; j < n; ++j) {
      const NodeId oj = inv[static_cast<std::size_t>(j)];
      code = code * 8 + static_cast<GraphCode>(pair_digit(
                            g.has_directed(oi, oj), g.has_directed(oj, oi), g.has_bidirected(oi, oj)));
    }
  }
  return code;
}

}  // namespace

GraphCode encode(const MixedGraph& g) {
  if (g.size() > kMaxNodes) throw std::invalid_argument("encode: at most 6 nodes");
  std::array<NodeId, kMaxNodes> id{};
  std::iota(id.begin(), id.end(), 0);
  return encode_permuted(g, id);
}

MixedGraph decode(GraphCode code, int n) { return decode(code, default_names(n)); }

MixedGraph decode(GraphCode code, std::vector<std::string> names) {
  using namespace pair_state;
  const int n = static_cast<int>(names.size());
  if (n > kMaxNodes) throw DataError("decode: at most 6 nodes");
  MixedGraph g(std::move(names));
  const int pairs = pair_count(n);
  std::vector<int> digits(static_cast<std::size_t>(pairs));
  for (int k = pairs - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = static_cast<int>(code % 8);
    code /= 8;
  }
  if (code != 0) throw DataError("decode: code has more digits than node pairs");
  int k = 0;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w, ++k) {
      switch (digits[static_cast<std::size_t>(k)]) {
        case kNone:
          break;
        case kForward:
          g.add_directed(v, w);
          break;
        case kBackward:
          g.add_directed(w, v);
          break;
        case kBidirected:
          g.add_bidirected(v, w);
          break;
        case kForwardBow:
          g.add_directed(v, w);
          g.add_bidirected(v, w);
          break;
        case kBackwardBow:
          g.add_directed(w, v);
          g.add_bidirected(v, w);
          break;
        default:
          throw DataError("decode: illegal pair-state digit");
      }
    }
  }
  return g;
}

GraphCode canonical_code(const MixedGraph& g) {
  const int n = g.size();
  if (n > kMaxNodes) throw std::invalid_argument("canonical_code: at most 6 nodes");
  std::array<NodeId, kMaxNodes> inv{};
  std::iota(inv.begin(), inv.end(), 0);
  GraphCode best = encode_permuted(g, inv);
  while (std::next_permutation(inv.begin(), inv.begin() + n)) {
    best = std::min(best, encode_permuted(g, inv));
  }
  return best;
}

std::uint64_t count_labeled_dags(int n) {
  if (n < 0 || n > 8) throw std::invalid_argument("count_labeled_dags: n out of range");
  std::vector<std::int64_t> a(static_cast<std::size_t>(n) + 1, 0);
  a[0] = 1;
  auto binom = [](int m, int k) {
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
  };
  for (int m = 1; m <= n; ++m) {
    std::int64_t sum = 0;
    for (int k = 1; k <= m; ++k) {
      const std::int64_t term = binom(m, k) * (std::int64_t{1} << (k * (m - k))) *
                                a[static_cast<std::size_t>(m - k)];
      sum += (k % 2 == 1) ? term : -term;
    }
    a[static_cast<std::size_t>(m)] = sum;
  }
  return static_cast<std::uint64_t>(a[static_cast<std::size_t>(n)]);
}

std::uint64_t count_acyclic(int n) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("count_acyclic: n must be in [1, 6]");
  return count_labeled_dags(n) << pair_count(n);
}

namespace {

struct AcyclicSearch {
  int n;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  const std::function<void(GraphCode)>& visit;

  // reach[v]: nodes reachable from v along a nonempty directed path.
  void run(std::size_t k, GraphCode code, std::array<std::uint32_t, kMaxNodes> reach) {
    if (k == pairs.size()) {
      visit(code);
      return;
    }
    const auto [v, w] = pairs[k];
    for (int digit = 0; digit < 6; ++digit) {
      NodeId tail = -1, head = -1;
      if (digit == pair_state::kForward || digit == pair_state::kForwardBow) {
        tail = v;
        head = w;
      } else if (digit == pair_state::kBackward || digit == pair_state::kBackwardBow) {
        tail = w;
        head = v;
      }
      if (tail < 0) {
        run(k + 1, code * 8 + static_cast<GraphCode>(digit), reach);
        continue;
      }
      if ((reach[static_cast<std::size_t>(head)] >> tail) & 1u) continue;  // would close a cycle
      auto next = reach;
      const std::uint32_t add = (1u << head) | reach[static_cast<std::size_t>(head)];
      for (NodeId x = 0; x < n; ++x) {
        if (x == tail || ((reach[static_cast<std::size_t>(x)] >> tail) & 1u)) {
          next[static_cast<std::size_t>(x)] |= add;
        }
      }
      run(k + 1, code * 8 + static_cast<GraphCode>(digit), next);
    }
  }
};

}  // namespace

void for_each_acyclic(int n, const std::function<void(GraphCode)>& visit) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("enumerate_acyclic: n must be in [1, 6]");
  AcyclicSearch search{n, {}, visit};
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) search.pairs.emplace_back(v, w);
  }
  search.run(0, 0, {});
}

std::vector<GraphCode> enumerate_acyclic(int n) {
  std::vector<GraphCode> out;
  out.reserve(static_cast<std::size_t>(count_acyclic(n)));
  for_each_acyclic(n, [&](GraphCode c) { out.push_back(c); });
  return out;
}

}  // namespace mixsem
