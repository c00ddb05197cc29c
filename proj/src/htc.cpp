#include "mixsem/htc.hpp"

#include <algorithm>
#include <bit>

namespace mixsem {

std::uint32_t half_trek_reachable(const MixedGraph& g, NodeId v) {
  std::uint32_t start = g.sibling_mask(v);
  std::uint32_t seen = start;
  std::uint32_t frontier = start | g.child_mask(v);
  seen |= frontier;
  while (frontier != 0) {
    std::uint32_t next = 0;
    for (NodeId w : mask_to_nodes(frontier)) next |= g.child_mask(w);
    frontier = next & ~seen;
    seen |= frontier;
  }
  return seen & ~(1u << v);
}

ParamPair<Rational> random_integer_params(const MixedGraph& g, std::mt19937_64& rng) {
  const int n = g.size();
  std::uniform_int_distribution<int> dist(1, 18);
  auto draw = [&]() {
    const int k = dist(rng);
    return k <= 9 ? k : 9 - k;  // 1..9 or -1..-9
  };
  ParamPair<Rational> p{MatrixQ::Zero(n, n), MatrixQ::Zero(n, n)};
  for (const auto& e : g.directed()) p.lambda(e.tail, e.head) = draw();
  for (const auto& e : g.bidirected()) {
    const Rational w = draw();
    p.omega(e.a, e.b) = w;
    p.omega(e.b, e.a) = w;
  }
  for (int v = 0; v < n; ++v) {
    Rational d = 1;
    for (int w = 0; w < n; ++w) {
      if (w != v) d += abs(p.omega(v, w));
    }
    p.omega(v, v) = d;
  }
  return p;
}

namespace {

constexpr int kGenericDraws = 3;

struct Draw {
  MatrixQ lambda;
  MatrixQ sigma;
};

std::vector<Draw> generic_draws(const MixedGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Draw> draws;
  int attempts = 0;
  while (static_cast<int>(draws.size()) < kGenericDraws) {
    if (++attempts > 100) throw InvariantViolation("could not draw invertible I - Lambda");
    auto p = random_integer_params(g, rng);
    try {
      draws.push_back({p.lambda, phi<Rational>(p.lambda, p.omega)});
    } catch (const NonInvertible&) {
      // only possible for cyclic graphs; redraw
    }
  }
  return draws;
}

bool generically_invertible(const MixedGraph& g, NodeId v, std::uint32_t yv,
                            const std::vector<Draw>& draws) {
  if (g.parent_mask(v) == 0) return true;
  IdentifyingSets y;
  y.sets.assign(static_cast<std::size_t>(g.size()), 0);
  y.sets[static_cast<std::size_t>(v)] = yv;
  const std::uint32_t all = (1u << g.size()) - 1;
  for (const auto& d : draws) {
    auto sys = build_linear_system<Rational>(g, y, v, d.sigma, d.lambda, all);
    if (matrix_rank<Rational>(sys.a) < sys.a.rows()) return false;
  }
  return true;
}

// Nodes allowed in Y_v, before the size and invertibility filters.
std::uint32_t allowed_mask(const MixedGraph& g, NodeId v, const std::vector<std::uint32_t>& htr) {
  std::uint32_t allowed = 0;
  for (NodeId y = 0; y < g.size(); ++y) {
    if (y == v || g.has_bidirected(y, v)) continue;
    if ((htr[static_cast<std::size_t>(y)] >> v) & 1u) allowed |= 1u << y;
  }
  return allowed;
}

bool pairwise_ok(const std::vector<std::uint32_t>& sets, NodeId v, std::uint32_t yv, NodeId upto) {
  for (NodeId w = 0; w < upto; ++w) {
    if (((yv >> w) & 1u) && ((sets[static_cast<std::size_t>(w)] >> v) & 1u)) return false;
  }
  return true;
}

}  // namespace

std::optional<std::vector<NodeId>> processing_order(const MixedGraph& g,
                                                    const std::vector<std::uint32_t>& sets) {
  const int n = g.size();
  std::vector<std::uint32_t> deps(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    deps[static_cast<std::size_t>(v)] = sets[static_cast<std::size_t>(v)] & half_trek_reachable(g, v);
  }
  std::vector<NodeId> order;
  std::uint32_t done = 0;
  while (static_cast<int>(order.size()) < n) {
    NodeId pick = -1;
    for (NodeId v = 0; v < n && pick < 0; ++v) {
      if (!((done >> v) & 1u) && (deps[static_cast<std::size_t>(v)] & ~done) == 0) pick = v;
    }
    if (pick < 0) return std::nullopt;
    done |= 1u << pick;
    order.push_back(pick);
  }
  return order;
}

HtcStatus find_identifying_sets(const MixedGraph& g, std::uint64_t seed) {
  const int n = g.size();
  std::vector<std::uint32_t> htr(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) htr[static_cast<std::size_t>(v)] = half_trek_reachable(g, v);

  std::vector<Draw> draws;
  std::vector<std::vector<std::uint32_t>> candidates(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    const std::uint32_t pa = g.parent_mask(v);
    const int k = std::popcount(pa);
    auto& cand = candidates[static_cast<std::size_t>(v)];
    if (k == 0) {
      cand.push_back(0);
      continue;
    }
    if (draws.empty()) draws = generic_draws(g, seed);
    const std::uint32_t allowed = allowed_mask(g, v, htr);
    if (std::popcount(allowed) < k) return {};
    if ((pa & ~allowed) == 0 && generically_invertible(g, v, pa, draws)) cand.push_back(pa);
    // remaining k-subsets of `allowed` in increasing mask order
    for (std::uint32_t s = allowed;; s = (s - 1) & allowed) {
      if (std::popcount(s) == k && s != pa && generically_invertible(g, v, s, draws)) {
        cand.push_back(s);
      }
      if (s == 0) break;
    }
    std::sort(cand.begin() + ((!cand.empty() && cand.front() == pa) ? 1 : 0), cand.end());
    if (cand.empty()) return {};
  }

  std::vector<std::uint32_t> sets(static_cast<std::size_t>(n), 0);
  std::optional<std::vector<NodeId>> order;
  auto search = [&](auto&& self, NodeId v) -> bool {
    if (v == n) {
      order = processing_order(g, sets);
      return order.has_value();
    }
    for (std::uint32_t yv : candidates[static_cast<std::size_t>(v)]) {
      if (!pairwise_ok(sets, v, yv, v)) continue;
      sets[static_cast<std::size_t>(v)] = yv;
      if (self(self, v + 1)) return true;
    }
    sets[static_cast<std::size_t>(v)] = 0;
    return false;
  };
  if (!search(search, 0)) return {};
  return {true, {sets, *order}};
}

std::optional<IdentifyingSets> check_identifying_sets(const MixedGraph& g,
                                                      const std::vector<std::uint32_t>& sets,
                                                      std::uint64_t seed) {
  const int n = g.size();
  if (static_cast<int>(sets.size()) != n) return std::nullopt;
  std::vector<std::uint32_t> htr(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) htr[static_cast<std::size_t>(v)] = half_trek_reachable(g, v);
  std::vector<Draw> draws = generic_draws(g, seed);
  for (NodeId v = 0; v < n; ++v) {
    const std::uint32_t yv = sets[static_cast<std::size_t>(v)];
    if (yv >> n) return std::nullopt;
    if (std::popcount(yv) != std::popcount(g.parent_mask(v))) return std::nullopt;
    if ((yv & ~allowed_mask(g, v, htr)) != 0) return std::nullopt;
    if (!pairwise_ok(sets, v, yv, n)) return std::nullopt;
    if (!generically_invertible(g, v, yv, draws)) return std::nullopt;
  }
  auto order = processing_order(g, sets);
  if (!order) return std::nullopt;
  return IdentifyingSets{sets, *order};
}

Membership membership(const MixedGraph& g, const IdentifyingSets& y, const Eigen::MatrixXd& sigma,
                      double tol) {
  Eigen::MatrixXd lambda;
  try {
    lambda = recover_lambda<double>(g, y, sigma);
  } catch (const SingularSystem&) {
    return Membership::NonGeneric;
  }
  const int n = g.size();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - lambda;
  if (std::abs(m.determinant()) < 1e-12) return Membership::NonGeneric;
  const Eigen::MatrixXd omega = recover_omega<double>(lambda, sigma);
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) {
      if (g.has_bidirected(v, w)) continue;
      if (std::abs(omega(v, w)) > tol * scale) return Membership::Outside;
    }
  }
  return Membership::Inside;
}

}  // namespace mixsem
