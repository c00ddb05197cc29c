#include "mixsem/equivalence.hpp"

#include "mixsem/graph_io.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace mixsem {

JacobianSpec jacobian_spec(const MixedGraph& g) {
  JacobianSpec spec;
  for (NodeId v = 0; v < g.size(); ++v) {
    for (NodeId w = v + 1; w < g.size(); ++w) {
      if (!g.has_bidirected(v, w)) spec.rows.emplace_back(v, w);
    }
  }
  spec.cols = g.directed();
  return spec;
}

RankReport generic_rank(const MixedGraph& g, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("generic_rank: trials must be positive");
  RankReport r{0, 0, trials, seed};
  const int cols = static_cast<int>(g.directed().size());
  const int rows = pair_count(g.size()) - static_cast<int>(g.bidirected().size());
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    auto p = random_integer_params(g, rng);
    MatrixQ sigma;
    try {
      sigma = phi<Rational>(p.lambda, p.omega);
    } catch (const NonInvertible&) {
      continue;  // cyclic graph hit a singular draw
    }
    r.rank = std::max(r.rank, matrix_rank<Rational>(jacobian_at<Rational>(g, p.lambda, sigma)));
    if (r.rank == std::min(rows, cols)) break;  // cannot grow further
  }
  r.deficiency = cols - r.rank;
  return r;
}

bool is_finite_to_one(const MixedGraph& g, int trials, std::uint64_t seed) {
  return generic_rank(g, trials, seed).deficiency == 0;
}

int model_dimension(const MixedGraph& g, int trials, std::uint64_t seed) {
  return generic_rank(g, trials, seed).rank + static_cast<int>(g.bidirected().size());
}

namespace {

int default_deficiency(const MixedGraph& g) { return generic_rank(g).deficiency; }

// Calls visit for every k-subset of edges until it returns false.
template <typename Visit>
void for_each_deletion(const MixedGraph& g, int k, Visit&& visit) {
  const auto edges = g.edges();
  const int m = static_cast<int>(edges.size());
  if (k > m) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<EdgeRef> del;
    for (int i : idx) del.push_back(edges[static_cast<std::size_t>(i)]);
    if (!visit(delete_edges(g, del))) return;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

std::vector<MixedGraph> theorem2_equivalents(const MixedGraph& g, const DeficiencyFn& deficiency) {
  const DeficiencyFn def = deficiency ? deficiency : DeficiencyFn(default_deficiency);
  const int k = def(g);
  if (k == 0) throw std::invalid_argument("theorem2_equivalents: graph is finite-to-one");
  std::vector<MixedGraph> out;
  for_each_deletion(g, k, [&](MixedGraph h) {
    if (def(h) == 0) out.push_back(std::move(h));
    return true;
  });
  if (out.empty()) throw InvariantViolation("no finite-to-one graph at deletion distance equal to the deficiency");
  return out;
}

int min_deletion_distance(const MixedGraph& g, const DeficiencyFn& deficiency) {
  const DeficiencyFn def = deficiency ? deficiency : DeficiencyFn(default_deficiency);
  for (int k = 0; k <= g.edge_count(); ++k) {
    bool found = false;
    for_each_deletion(g, k, [&](const MixedGraph& h) {
      found = def(h) == 0;
      return !found;
    });
    if (found) return k;
  }
  throw InvariantViolation("the empty graph is always finite-to-one");
}

int Census::index_of(GraphCode code) const {
  auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) return -1;
  return static_cast<int>(it - codes.begin());
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  // The smaller root survives, which keeps the result order independent.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Groups of indices by union-find root, ordered by smallest member.
std::vector<std::vector<int>> groups(UnionFind& uf, std::size_t n) {
  std::map<int, std::vector<int>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

}  // namespace

Census cluster_all(int n, int trials, std::uint64_t seed) {
  Census c;
  c.n = n;
  c.codes = enumerate_acyclic(n);
  const std::size_t count = c.codes.size();
  c.rank.resize(count);
  c.directed.resize(count);
  c.bidirected.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto g = decode(c.codes[i], n);
    c.rank[i] = generic_rank(g, trials, seed).rank;
    c.directed[i] = static_cast<int>(g.directed().size());
    c.bidirected[i] = static_cast<int>(g.bidirected().size());
  }
  const DeficiencyFn lookup = [&c](const MixedGraph& h) {
    const int i = c.index_of(encode(h));
    if (i < 0) throw InvariantViolation("deleted subgraph missing from the census");
    return c.deficiency(i);
  };
  UnionFind uf(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (c.deficiency(static_cast<int>(i)) == 0) continue;
    for (const auto& h : theorem2_equivalents(decode(c.codes[i], n), lookup)) {
      uf.unite(static_cast<int>(i), c.index_of(encode(h)));
    }
  }
  c.clusters = groups(uf, count);
  c.cluster.assign(count, -1);
  for (std::size_t k = 0; k < c.clusters.size(); ++k) {
    for (int i : c.clusters[k]) c.cluster[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return c;
}

bool representative_before(const MixedGraph& a, const MixedGraph& b) {
  const auto fa = structure_predicates(a);
  const auto fb = structure_predicates(b);
  if (fa.is_dag != fb.is_dag) return fa.is_dag;
  if (fa.is_bow_free != fb.is_bow_free) return fa.is_bow_free;
  if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
  return encode(a) < encode(b);
}

namespace {

struct Candidate {
  MixedGraph graph;
  IdentifyingSets y;
};

std::optional<Candidate> pick_representative(const Census& c, const std::vector<int>& members) {
  std::vector<MixedGraph> graphs;
  for (int i : members) graphs.push_back(decode(c.codes[static_cast<std::size_t>(i)], c.n));
  std::sort(graphs.begin(), graphs.end(), representative_before);
  for (auto& g : graphs) {
    auto r = find_identifying_sets(g);
    if (r.identifiable) return Candidate{std::move(g), std::move(r.sets)};
  }
  return std::nullopt;
}

bool vanish_at(const ConstraintSet& cs, const std::vector<Rational>& point) {
  for (const auto& p : cs.polys) {
    if (p.evaluate(point) != 0) return false;
  }
  return true;
}

std::vector<std::string> constraint_strings(const ConstraintSet& cs, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& p : cs.polys) out.push_back(to_string(p, names));
  return out;
}

}  // namespace

ClassTable merge_clusters(const Census& census, std::uint64_t seed) {
  const std::size_t k = census.clusters.size();
  struct ClusterInfo {
    Candidate rep;
    int dimension;
    ConstraintSet constraints;
    std::vector<Rational> point;
  };
  std::vector<ClusterInfo> info;
  info.reserve(k);
  std::mt19937_64 rng(seed);
  for (std::size_t ci = 0; ci < k; ++ci) {
    const auto& members = census.clusters[ci];
    auto rep = pick_representative(census, members);
    if (!rep) {
      throw MissingRepresentative("cluster containing graph code " +
                                  std::to_string(census.codes[static_cast<std::size_t>(members.front())]) +
                                  " has no HTC-identifiable member");
    }
    const int dim = census.dimension(census.index_of(encode(rep->graph)));
    for (int i : members) {
      if (census.dimension(i) != dim) throw InvariantViolation("cluster members differ in dimension");
    }
    auto cs = theorem1_constraints(rep->graph, rep->y);
    auto point = random_model_point(rep->graph, rng);
    info.push_back({std::move(*rep), dim, std::move(cs), std::move(point)});
  }

  ClassTable table;
  table.n = census.n;
  table.graph_count = census.codes.size();
  table.cluster_count = k;
  UnionFind uf(k);
  const auto names = MixedGraph(census.n).names();
  std::map<std::pair<int, std::vector<std::string>>, int> seen;
  for (std::size_t ci = 0; ci < k; ++ci) {
    auto key = std::make_pair(info[ci].dimension, constraint_strings(info[ci].constraints, names));
    auto [it, inserted] = seen.emplace(std::move(key), static_cast<int>(ci));
    if (!inserted && uf.unite(it->second, static_cast<int>(ci))) {
      table.merges.push_back({it->second, static_cast<int>(ci), true});
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (info[a].dimension != info[b].dimension) continue;
      if (uf.find(static_cast<int>(a)) == uf.find(static_cast<int>(b))) continue;
      if (!vanish_at(info[a].constraints, info[b].point) || !vanish_at(info[b].constraints, info[a].point)) continue;
      if (clusters_equivalent(info[a].constraints, info[a].dimension, info[b].constraints, info[b].dimension,
                              info[a].rep.graph, info[b].rep.graph)) {
        uf.unite(static_cast<int>(a), static_cast<int>(b));
        table.merges.push_back({static_cast<int>(a), static_cast<int>(b), false});
      }
    }
  }

  for (const auto& group : groups(uf, k)) {
    ClassEntry e;
    e.id = static_cast<int>(table.classes.size());
    e.clusters = group;
    std::size_t best = static_cast<std::size_t>(group.front());
    for (int ci : group) {
      const auto i = static_cast<std::size_t>(ci);
      for (int m : census.clusters[i]) e.members.push_back(census.codes[static_cast<std::size_t>(m)]);
      if (representative_before(info[i].rep.graph, info[best].rep.graph)) best = i;
    }
    std::sort(e.members.begin(), e.members.end());
    e.dimension = info[best].dimension;
    e.representative = info[best].rep.graph;
    e.identifying_sets = info[best].rep.y;
    e.constraints = info[best].constraints;
    table.classes.push_back(std::move(e));
  }
  return table;
}

ClassTable build_class_table(int n, int trials, std::uint64_t seed) {
  return merge_clusters(cluster_all(n, trials, seed), seed);
}

int ClassTable::class_of(GraphCode code) const {
  for (const auto& c : classes) {
    if (std::binary_search(c.members.begin(), c.members.end(), code)) return c.id;
  }
  return -1;
}

nlohmann::json class_table_to_json(const ClassTable& t) {
  nlohmann::json j;
  j["n"] = t.n;
  j["graph_count"] = t.graph_count;
  j["cluster_count"] = t.cluster_count;
  j["class_count"] = t.classes.size();
  j["classes"] = nlohmann::json::array();
  for (const auto& c : t.classes) {
    nlohmann::json e;
    e["id"] = c.id;
    e["dimension"] = c.dimension;
    e["members"] = c.members;
    e["clusters"] = c.clusters;
    if (c.representative) {
      const auto& g = *c.representative;
      e["representative"] = graph_to_json(g);
      nlohmann::json y = nlohmann::json::object();
      for (NodeId v = 0; v < g.size(); ++v) {
        std::vector<std::string> ys;
        for (NodeId x : c.identifying_sets.members(v)) ys.push_back(g.name(x));
        y[g.name(v)] = ys;
      }
      e["identifying_sets"] = y;
    } else {
      e["representative"] = nullptr;
    }
    e["constraints"] = nlohmann::json::array();
    const auto names = c.representative ? c.representative->names() : MixedGraph(t.n).names();
    for (std::size_t i = 0; i < c.constraints.polys.size(); ++i) {
      e["constraints"].push_back({{"poly", to_string(c.constraints.polys[i], names)},
                                  {"tag", c.constraints.tags[i].to_string(names)}});
    }
    j["classes"].push_back(std::move(e));
  }
  j["merges"] = nlohmann::json::array();
  for (const auto& m : t.merges) {
    j["merges"].push_back({{"clusters", {m.cluster_a, m.cluster_b}},
                           {"reason", m.identical_constraints ? "identical_constraints" : "mutual_vanishing"}});
  }
  return j;
}

ClassTable class_table_from_json(const nlohmann::json& j) {
  try {
    ClassTable t;
    t.n = j.at("n").get<int>();
    if (t.n < 1 || t.n > kMaxNodes) throw DataError("class table: n out of range");
    t.graph_count = j.at("graph_count").get<std::size_t>();
    t.cluster_count = j.at("cluster_count").get<std::size_t>();
    for (const auto& e : j.at("classes")) {
      ClassEntry c;
      c.id = e.at("id").get<int>();
      c.dimension = e.at("dimension").get<int>();
      c.members = e.at("members").get<std::vector<GraphCode>>();
      std::sort(c.members.begin(), c.members.end());
      if (e.contains("clusters")) c.clusters = e.at("clusters").get<std::vector<int>>();
      auto names = MixedGraph(t.n).names();
      if (e.contains("representative") && !e.at("representative").is_null()) {
        MixedGraph g = graph_from_json(e.at("representative"));
        names = g.names();
        std::vector<std::uint32_t> sets(static_cast<std::size_t>(g.size()), 0);
        if (e.contains("identifying_sets")) {
          for (const auto& [node, ys] : e.at("identifying_sets").items()) {
            const NodeId v = g.find(node);
            if (v < 0) throw DataError("class table: unknown node '" + node + "'");
            for (const auto& y : ys.get<std::vector<std::string>>()) {
              const NodeId x = g.find(y);
              if (x < 0) throw DataError("class table: unknown node '" + y + "'");
              sets[static_cast<std::size_t>(v)] |= 1u << x;
            }
          }
        }
        auto order = processing_order(g, sets);
        if (!order) throw DataError("class table: cyclic identifying-set dependencies");
        c.identifying_sets = {sets, *order};
        c.representative = std::move(g);
      }
      std::vector<Polynomial> polys;
      for (const auto& p : e.at("constraints")) polys.push_back(parse_polynomial(p.at("poly").get<std::string>(), names));
      c.constraints = make_constraint_set(std::move(polys), t.n);
      t.classes.push_back(std::move(c));
    }
    if (j.contains("merges")) {
      for (const auto& m : j.at("merges")) {
        const auto cl = m.at("clusters").get<std::vector<int>>();
        if (cl.size() != 2) throw DataError("class table: merge needs two clusters");
        t.merges.push_back({cl[0], cl[1], m.at("reason").get<std::string>() == "identical_constraints"});
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed class table: ") + e.what());
  }
}

bool prop1_check(const MixedGraph& g1, const MixedGraph& g2) {
  if (g1.size() != g2.size()) return false;
  for (const auto* g : {&g1, &g2}) {
    const auto f = structure_predicates(*g);
    if (!f.is_acyclic || !f.is_bow_free) return false;
  }
  if (!(skeleton(g1) == skeleton(g2))) return false;
  const int n = g1.size();
  for (NodeId mid = 0; mid < n; ++mid) {
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        if (a == mid || b == mid || !g1.adjacent(a, mid) || !g1.adjacent(mid, b)) continue;
        const bool c1 = collider_type(g1, a, mid, b) != ColliderType::NotCollider;
        const bool c2 = collider_type(g2, a, mid, b) != ColliderType::NotCollider;
        if (c1 != c2) return false;
      }
    }
  }
  return true;
}

}  // namespace mixsem
