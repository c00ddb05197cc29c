#ifndef MIXSEM_CONSTRAINTS_HPP
#define MIXSEM_CONSTRAINTS_HPP

#include "mixsem/graph.hpp"
#include "mixsem/htc.hpp"
#include "mixsem/polynomial.hpp"

#include <array>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace mixsem {

/// det(A) is the zero polynomial.
class IdenticallySingular : public Error {
 public:
  using Error::Error;
};

using SymbolicMatrix = std::vector<std::vector<RationalFunction>>;

/// Cramer's rule with fraction-free determinants.
std::vector<RationalFunction> solve_symbolic(const SymbolicMatrix& a,
                                             const std::vector<RationalFunction>& b);

/// Determinant of a square polynomial matrix (Bareiss elimination).
Polynomial determinant(std::vector<std::vector<Polynomial>> m);

/// Lambda_Y(Sigma) with one common denominator per column: lambda_uv =
/// num[v][u] / den[v] for u in pa(v). Columns without parents have den 1.
struct SymbolicLambda {
  std::vector<Polynomial> den;
  std::vector<std::map<NodeId, Polynomial>> num;
};

SymbolicLambda symbolic_lambda(const MixedGraph& g, const IdentifyingSets& y);
std::map<DirectedEdge, RationalFunction> lambda_symbolic(const MixedGraph& g, const IdentifyingSets& y);

struct ConstraintTag {
  enum class Kind { VanishingCovariance, VanishingPartialCorrelation, Tetrad, Other };
  Kind kind = Kind::Other;
  NodeId v = -1, w = -1;
  std::uint32_t given = 0;          // conditioning set
  std::array<NodeId, 4> tetrad{};   // sigma_t0t1 sigma_t2t3 - sigma_t0t3 sigma_t2t1

  /// e.g. "cov(c,d)", "pcorr(a,d|b,c)", "tetrad(ab,cd;ad,cb)", "other".
  std::string to_string(const std::vector<std::string>& names) const;
  bool operator==(const ConstraintTag&) const = default;
};

struct ConstraintSet {
  std::vector<Polynomial> polys;  // canonical, deduplicated, sorted
  std::vector<ConstraintTag> tags;
};

/// Total order used to sort constraint lists.
bool polynomial_less(const Polynomial& a, const Polynomial& b);

/// Sorts, deduplicates and tags. Input polynomials must be canonical.
ConstraintSet make_constraint_set(std::vector<Polynomial> polys, int n);

/// One cleared, canonical polynomial per pair {v,w} not in B with v not in
/// Y_w and w not in Y_v (pairs whose numerator is identically zero are skipped).
ConstraintSet theorem1_constraints(const MixedGraph& g, const IdentifyingSets& y);

/// Canonical det Sigma[{v} u S, {w} u S].
Polynomial vanishing_pcorr_poly(NodeId v, NodeId w, std::uint32_t given);

/// Matches vanishing covariances, partial correlations with |S| <= n - 2 and
/// tetrads on n nodes; Other otherwise.
ConstraintTag recognize(const Polynomial& p, int n);

/// Covariance values at random integer parameters of g, indexed by sigma_var.
std::vector<Rational> random_model_point(const MixedGraph& g, std::mt19937_64& rng);

/// Sigma entries of g as polynomials in lambda and omega variables, indexed
/// by sigma_var. Throws std::invalid_argument for cyclic graphs.
std::vector<Polynomial> symbolic_covariances(const MixedGraph& g);

/// True iff p vanishes identically on the parameterization of acyclic g.
/// A random model point is tried first; the symbolic check confirms.
bool vanishes_on_model(const Polynomial& p, const MixedGraph& g, std::uint64_t seed = kDefaultSeed);

bool clusters_equivalent(const ConstraintSet& a, int dim_a, const ConstraintSet& b, int dim_b,
                         const MixedGraph& rep_a, const MixedGraph& rep_b);

}  // namespace mixsem

#endif  // MIXSEM_CONSTRAINTS_HPP
