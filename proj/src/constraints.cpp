#include "mixsem/constraints.hpp"

#include <algorithm>
#include <bit>
#include <mutex>

namespace mixsem {

Polynomial determinant(std::vector<std::vector<Polynomial>> m) {
  const std::size_t k = m.size();
  if (k == 0) return Polynomial(1);
  for (const auto& row : m) {
    if (row.size() != k) throw std::invalid_argument("determinant: matrix is not square");
  }
  int sign = 1;
  Polynomial prev(1);
  for (std::size_t i = 0; i < k; ++i) {
    if (m[i][i].is_zero()) {
      std::size_t r = i + 1;
      while (r < k && m[r][i].is_zero()) ++r;
      if (r == k) return Polynomial();
      std::swap(m[r], m[i]);
      sign = -sign;
    }
    for (std::size_t r = i + 1; r < k; ++r) {
      for (std::size_t c = i + 1; c < k; ++c) {
        m[r][c] = divide_exact(m[r][c] * m[i][i] - m[r][i] * m[i][c], prev);
      }
    }
    prev = m[i][i];
  }
  return sign > 0 ? m[k - 1][k - 1] : -m[k - 1][k - 1];
}

namespace {

Polynomial lcm(const Polynomial& a, const Polynomial& b) {
  if (a.is_constant()) return b;
  if (b.is_constant()) return a;
  return divide_exact(a * b, gcd(a, b));
}

// Cramer numerators and denominator for a polynomial system.
std::pair<std::vector<Polynomial>, Polynomial> cramer(const std::vector<std::vector<Polynomial>>& a,
                                                      const std::vector<Polynomial>& b) {
  const Polynomial det = determinant(a);
  if (det.is_zero()) throw IdenticallySingular("system matrix is identically singular");
  std::vector<Polynomial> nums;
  for (std::size_t j = 0; j < a.size(); ++j) {
    auto aj = a;
    for (std::size_t i = 0; i < a.size(); ++i) aj[i][j] = b[i];
    nums.push_back(determinant(std::move(aj)));
  }
  return {nums, det};
}

}  // namespace

std::vector<RationalFunction> solve_symbolic(const SymbolicMatrix& a,
                                             const std::vector<RationalFunction>& b) {
  const std::size_t k = a.size();
  if (b.size() != k) throw std::invalid_argument("solve_symbolic: shape mismatch");
  std::vector<std::vector<Polynomial>> pa(k, std::vector<Polynomial>(k));
  std::vector<Polynomial> pb(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i].size() != k) throw std::invalid_argument("solve_symbolic: matrix is not square");
    Polynomial l = b[i].den();
    for (const auto& e : a[i]) l = lcm(l, e.den());
    for (std::size_t j = 0; j < k; ++j) pa[i][j] = a[i][j].num() * divide_exact(l, a[i][j].den());
    pb[i] = b[i].num() * divide_exact(l, b[i].den());
  }
  auto [nums, det] = cramer(pa, pb);
  std::vector<RationalFunction> x;
  for (const auto& n : nums) x.emplace_back(n, det);
  return x;
}

SymbolicLambda symbolic_lambda(const MixedGraph& g, const IdentifyingSets& y) {
  const int n = g.size();
  if (n > kMaxNodes) throw std::invalid_argument("symbolic recovery supports at most 6 nodes");
  SymbolicLambda out{std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial(1)),
                     std::vector<std::map<NodeId, Polynomial>>(static_cast<std::size_t>(n))};
  std::uint32_t finished = 0;
  for (NodeId v : y.order) {
    const auto pa = g.parents(v);
    const auto ys = y.members(v);
    if (ys.size() != pa.size()) throw InvariantViolation("|Y_v| differs from |pa(v)|");
    if (!pa.empty()) {
      const std::uint32_t htr = half_trek_reachable(g, v);
      // Rows y in htr(v) are scaled by the denominator of column y.
      auto entry = [&](NodeId yi, NodeId x) {
        if (!((htr >> yi) & 1u)) return sigma(yi, x);
        if (!((finished >> yi) & 1u)) {
          throw OrderingViolation("Lambda column of " + g.name(yi) + " needed before " + g.name(v));
        }
        const auto col = static_cast<std::size_t>(yi);
        Polynomial e = out.den[col] * sigma(yi, x);
        for (const auto& [u, nu] : out.num[col]) e -= nu * sigma(u, x);
        return e;
      };
      const std::size_t k = pa.size();
      std::vector<std::vector<Polynomial>> a(k, std::vector<Polynomial>(k));
      std::vector<Polynomial> b(k);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i][j] = entry(ys[i], pa[j]);
        b[i] = entry(ys[i], v);
      }
      auto [nums, det] = cramer(a, b);
      Polynomial common = det;
      for (const auto& p : nums) {
        if (common.is_constant()) break;
        common = gcd(common, p);
      }
      if (!common.is_constant()) {
        det = divide_exact(det, common);
        for (auto& p : nums) p = divide_exact(p, common);
      }
      const Rational c = Rational(1) / content(det);
      det *= c;
      auto& col = out.num[static_cast<std::size_t>(v)];
      for (std::size_t j = 0; j < k; ++j) col[pa[j]] = nums[j] * c;
      out.den[static_cast<std::size_t>(v)] = det;
    }
    finished |= 1u << v;
  }
  return out;
}

std::map<DirectedEdge, RationalFunction> lambda_symbolic(const MixedGraph& g, const IdentifyingSets& y) {
  const auto s = symbolic_lambda(g, y);
  std::map<DirectedEdge, RationalFunction> out;
  for (const auto& e : g.directed()) {
    const auto col = static_cast<std::size_t>(e.head);
    out.emplace(e, RationalFunction(s.num[col].at(e.tail), s.den[col]));
  }
  return out;
}

std::string ConstraintTag::to_string(const std::vector<std::string>& names) const {
  auto nm = [&](NodeId v) { return names.at(static_cast<std::size_t>(v)); };
  switch (kind) {
    case Kind::VanishingCovariance:
      return "cov(" + nm(v) + "," + nm(w) + ")";
    case Kind::VanishingPartialCorrelation: {
      std::string s = "pcorr(" + nm(v) + "," + nm(w) + "|";
      bool first = true;
      for (NodeId u : mask_to_nodes(given)) {
        s += (first ? "" : ",") + nm(u);
        first = false;
      }
      return s + ")";
    }
    case Kind::Tetrad:
      return "tetrad(" + nm(tetrad[0]) + nm(tetrad[1]) + "," + nm(tetrad[2]) + nm(tetrad[3]) + ";" +
             nm(tetrad[0]) + nm(tetrad[3]) + "," + nm(tetrad[2]) + nm(tetrad[1]) + ")";
    case Kind::Other:
      break;
  }
  return "other";
}

bool polynomial_less(const Polynomial& a, const Polynomial& b) {
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first < ib->first;
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return ia == a.terms().end() && ib != b.terms().end();
}

ConstraintSet make_constraint_set(std::vector<Polynomial> polys, int n) {
  std::sort(polys.begin(), polys.end(), polynomial_less);
  polys.erase(std::unique(polys.begin(), polys.end()), polys.end());
  ConstraintSet cs;
  for (auto& p : polys) {
    cs.tags.push_back(recognize(p, n));
    cs.polys.push_back(std::move(p));
  }
  return cs;
}

ConstraintSet theorem1_constraints(const MixedGraph& g, const IdentifyingSets& y) {
  const int n = g.size();
  const auto lam = symbolic_lambda(g, y);
  // column v of (I - Lambda) scaled by den[v]
  auto column = [&](NodeId v) {
    std::vector<std::pair<NodeId, Polynomial>> col;
    col.emplace_back(v, lam.den[static_cast<std::size_t>(v)]);
    for (const auto& [u, p] : lam.num[static_cast<std::size_t>(v)]) col.emplace_back(u, -p);
    return col;
  };
  std::vector<Polynomial> polys;
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) {
      if (g.has_bidirected(v, w)) continue;
      if (((y.sets[static_cast<std::size_t>(w)] >> v) & 1u) ||
          ((y.sets[static_cast<std::size_t>(v)] >> w) & 1u)) {
        continue;
      }
      Polynomial p;
      for (const auto& [i, ci] : column(v)) {
        for (const auto& [j, cj] : column(w)) p += ci * cj * sigma(i, j);
      }
      if (p.is_zero()) continue;
      for (NodeId x : {v, w}) {
        const Polynomial& d = lam.den[static_cast<std::size_t>(x)];
        if (d.is_constant()) continue;
        const Polynomial c = gcd(p, d);
        if (!c.is_constant()) p = divide_exact(p, c);
      }
      polys.push_back(canonicalize(p));
    }
  }
  return make_constraint_set(std::move(polys), n);
}

Polynomial vanishing_pcorr_poly(NodeId v, NodeId w, std::uint32_t given) {
  if (v == w || ((given >> v) & 1u) || ((given >> w) & 1u)) {
    throw std::invalid_argument("vanishing_pcorr_poly: v, w must be distinct and outside S");
  }
  std::vector<NodeId> rows{v}, cols{w};
  for (NodeId u : mask_to_nodes(given)) {
    rows.push_back(u);
    cols.push_back(u);
  }
  std::vector<std::vector<Polynomial>> m(rows.size(), std::vector<Polynomial>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) m[i][j] = sigma(rows[i], cols[j]);
  }
  return canonicalize(determinant(std::move(m)));
}

namespace {

using Templates = std::map<std::string, ConstraintTag>;

std::vector<std::string> generic_names() {
  std::vector<std::string> names;
  for (int i = 0; i < kMaxNodes; ++i) names.emplace_back(1, static_cast<char>('a' + i));
  return names;
}

Templates build_templates(int n) {
  Templates t;
  const auto names = generic_names();
  auto add = [&](const Polynomial& p, const ConstraintTag& tag) { t.emplace(to_string(p, names), tag); };
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) {
      ConstraintTag tag;
      tag.kind = ConstraintTag::Kind::VanishingCovariance;
      tag.v = v;
      tag.w = w;
      add(canonicalize(sigma(v, w)), tag);
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) {
      const std::uint32_t rest = ((1u << n) - 1) & ~(1u << v) & ~(1u << w);
      for (std::uint32_t s = rest; s != 0; s = (s - 1) & rest) {
        if (std::popcount(s) > n - 2) continue;
        ConstraintTag tag;
        tag.kind = ConstraintTag::Kind::VanishingPartialCorrelation;
        tag.v = v;
        tag.w = w;
        tag.given = s;
        add(vanishing_pcorr_poly(v, w, s), tag);
      }
    }
  }
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = 0; b < n; ++b) {
      for (NodeId c = 0; c < n; ++c) {
        for (NodeId d = 0; d < n; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          ConstraintTag tag;
          tag.kind = ConstraintTag::Kind::Tetrad;
          tag.tetrad = {a, b, c, d};
          add(canonicalize(sigma(a, b) * sigma(c, d) - sigma(a, d) * sigma(c, b)), tag);
        }
      }
    }
  }
  return t;
}

const Templates& templates(int n) {
  static std::array<std::once_flag, kMaxNodes + 1> flags;
  static std::array<Templates, kMaxNodes + 1> cache;
  std::call_once(flags[static_cast<std::size_t>(n)], [n] { cache[static_cast<std::size_t>(n)] = build_templates(n); });
  return cache[static_cast<std::size_t>(n)];
}

}  // namespace

ConstraintTag recognize(const Polynomial& p, int n) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("recognize: n out of range");
  if (p.is_zero()) return {};
  const auto& t = templates(n);
  auto it = t.find(to_string(canonicalize(p), generic_names()));
  return it == t.end() ? ConstraintTag{} : it->second;
}

std::vector<Rational> random_model_point(const MixedGraph& g, std::mt19937_64& rng) {
  const int n = g.size();
  if (n > kMaxNodes) throw std::invalid_argument("random_model_point: at most 6 nodes");
  MatrixQ s;
  for (int attempt = 0;; ++attempt) {
    const auto p = random_integer_params(g, rng);
    try {
      s = phi<Rational>(p.lambda, p.omega);
      break;
    } catch (const NonInvertible&) {
      if (attempt > 100) throw;
    }
  }
  std::vector<Rational> point(static_cast<std::size_t>(kSigmaVars));
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v; w < n; ++w) point[static_cast<std::size_t>(sigma_var(v, w))] = s(v, w);
  }
  return point;
}

std::vector<Polynomial> symbolic_covariances(const MixedGraph& g) {
  if (!is_acyclic(g)) throw std::invalid_argument("symbolic covariances need an acyclic graph");
  const int n = g.size();
  const auto nn = static_cast<std::size_t>(n);
  using PMatrix = std::vector<std::vector<Polynomial>>;
  PMatrix lambda(nn, std::vector<Polynomial>(nn));
  PMatrix omega(nn, std::vector<Polynomial>(nn));
  Var next = kSigmaVars;
  for (const auto& e : g.directed()) {
    lambda[static_cast<std::size_t>(e.tail)][static_cast<std::size_t>(e.head)] = Polynomial::variable(next++);
  }
  for (NodeId v = 0; v < n; ++v) omega[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] = Polynomial::variable(next++);
  for (const auto& e : g.bidirected()) {
    const auto x = Polynomial::variable(next++);
    omega[static_cast<std::size_t>(e.a)][static_cast<std::size_t>(e.b)] = x;
    omega[static_cast<std::size_t>(e.b)][static_cast<std::size_t>(e.a)] = x;
  }
  if (next > kMaxVars) throw std::invalid_argument("too many parameters for symbolic substitution");
  // T = (I - Lambda)^{-1} = I + Lambda + ... + Lambda^{n-1}
  PMatrix t(nn, std::vector<Polynomial>(nn));
  PMatrix power(nn, std::vector<Polynomial>(nn));
  for (std::size_t i = 0; i < nn; ++i) power[i][i] = Polynomial(1);
  for (int k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = 0; j < nn; ++j) t[i][j] += power[i][j];
    }
    PMatrix nextp(nn, std::vector<Polynomial>(nn));
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t l = 0; l < nn; ++l) {
        if (power[i][l].is_zero()) continue;
        for (std::size_t j = 0; j < nn; ++j) {
          if (!lambda[l][j].is_zero()) nextp[i][j] += power[i][l] * lambda[l][j];
        }
      }
    }
    power = std::move(nextp);
  }
  // Sigma = T^T Omega T
  PMatrix ot(nn, std::vector<Polynomial>(nn));
  for (std::size_t k = 0; k < nn; ++k) {
    for (std::size_t l = 0; l < nn; ++l) {
      if (omega[k][l].is_zero()) continue;
      for (std::size_t j = 0; j < nn; ++j) {
        if (!t[l][j].is_zero()) ot[k][j] += omega[k][l] * t[l][j];
      }
    }
  }
  std::vector<Polynomial> out(static_cast<std::size_t>(kSigmaVars));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i; j < n; ++j) {
      Polynomial s;
      for (std::size_t k = 0; k < nn; ++k) {
        const auto& tki = t[k][static_cast<std::size_t>(i)];
        if (!tki.is_zero()) s += tki * ot[k][static_cast<std::size_t>(j)];
      }
      out[static_cast<std::size_t>(sigma_var(i, j))] = std::move(s);
    }
  }
  return out;
}

bool vanishes_on_model(const Polynomial& p, const MixedGraph& g, std::uint64_t seed) {
  if (!is_acyclic(g)) throw std::invalid_argument("vanishes_on_model needs an acyclic graph");
  if (p.is_zero()) return true;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 2; ++i) {
    if (p.evaluate(random_model_point(g, rng)) != 0) return false;
  }
  const auto cov = symbolic_covariances(g);
  std::vector<const Polynomial*> images(static_cast<std::size_t>(kMaxVars), nullptr);
  for (NodeId v = 0; v < g.size(); ++v) {
    for (NodeId w = v; w < g.size(); ++w) {
      const auto var = static_cast<std::size_t>(sigma_var(v, w));
      images[var] = &cov[var];
    }
  }
  return p.substitute(images).is_zero();
}

bool clusters_equivalent(const ConstraintSet& a, int dim_a, const ConstraintSet& b, int dim_b,
                         const MixedGraph& rep_a, const MixedGraph& rep_b) {
  if (dim_a != dim_b) return false;
  for (const auto& p : a.polys) {
    if (!vanishes_on_model(p, rep_b)) return false;
  }
  for (const auto& p : b.polys) {
    if (!vanishes_on_model(p, rep_a)) return false;
  }
  return true;
}

}  // namespace mixsem
