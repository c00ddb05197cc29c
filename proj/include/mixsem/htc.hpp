#ifndef MIXSEM_HTC_HPP
#define MIXSEM_HTC_HPP

#include "mixsem/graph.hpp"
#include "mixsem/scalar.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mixsem {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Nodes w != v reachable from v by a directed path, or by one bidirected
/// edge followed by a (possibly empty) directed path.
std::uint32_t half_trek_reachable(const MixedGraph& g, NodeId v);

struct IdentifyingSets {
  std::vector<std::uint32_t> sets;  // Y_v as a node bitmask, indexed by v
  std::vector<NodeId> order;

  std::vector<NodeId> members(NodeId v) const {
    return mask_to_nodes(sets.at(static_cast<std::size_t>(v)));
  }
};

struct HtcStatus {
  bool identifiable = false;
  IdentifyingSets sets;  // meaningful only when identifiable
};

/// Searches per-node candidate sets. For each node the candidate pa(v) is
/// tried first, so DAGs get Y_v = pa(v).
HtcStatus find_identifying_sets(const MixedGraph& g, std::uint64_t seed = kDefaultSeed);

/// Validates a given family against every invariant and generic
/// invertibility. Returns the family with its processing order, or nullopt.
std::optional<IdentifyingSets> check_identifying_sets(const MixedGraph& g,
                                                      const std::vector<std::uint32_t>& sets,
                                                      std::uint64_t seed = kDefaultSeed);

/// Processing order for the dependency relation y -> v, y in Y_v ∩ htr(v);
/// nullopt when it is cyclic. Ties go to the smallest node.
std::optional<std::vector<NodeId>> processing_order(const MixedGraph& g,
                                                    const std::vector<std::uint32_t>& sets);

/// Raised when a per-node system matrix is singular at the given Sigma.
class SingularSystem : public Error {
 public:
  SingularSystem(NodeId v, const std::string& msg) : Error(msg), node(v) {}
  NodeId node;
};

/// A Lambda column needed by a system has not been recovered yet.
class OrderingViolation : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
struct ParamPair {
  Matrix<Scalar> lambda;
  Matrix<Scalar> omega;
};

/// Random integer parameters: lambda in [-9, 9] \ {0} on D, omega
/// off-diagonals likewise on B, diagonal 1 + sum of |off-diagonals|.
ParamPair<Rational> random_integer_params(const MixedGraph& g, std::mt19937_64& rng);

template <typename Scalar>
struct LinearSystem {
  Matrix<Scalar> a;
  Vector<Scalar> b;
};

/// Row i belongs to y_i in Y_v, column j to the j-th parent of v.
/// `finished` is the bitmask of nodes whose Lambda columns are filled in.
template <typename Scalar>
LinearSystem<Scalar> build_linear_system(const MixedGraph& g, const IdentifyingSets& y, NodeId v,
                                         const Matrix<Scalar>& sigma,
                                         const Matrix<Scalar>& lambda_known,
                                         std::uint32_t finished) {
  const auto ys = y.members(v);
  const auto pa = g.parents(v);
  const std::uint32_t htr = half_trek_reachable(g, v);
  const auto k = static_cast<Eigen::Index>(pa.size());
  if (static_cast<Eigen::Index>(ys.size()) != k) {
    throw InvariantViolation("|Y_v| differs from |pa(v)| at node " + g.name(v));
  }
  LinearSystem<Scalar> sys{Matrix<Scalar>(k, k), Vector<Scalar>(k)};
  // [(I - Lambda)^T Sigma]_{y, x} = sigma_yx - sum over parents u of y of lambda_uy sigma_ux
  auto entry = [&](NodeId yi, NodeId x) {
    Scalar s = sigma(yi, x);
    if ((htr >> yi) & 1u) {
      for (NodeId u : g.parents(yi)) s -= lambda_known(u, yi) * sigma(u, x);
    }
    return s;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    const NodeId yi = ys[static_cast<std::size_t>(i)];
    if (((htr >> yi) & 1u) && !((finished >> yi) & 1u)) {
      throw OrderingViolation("Lambda column of " + g.name(yi) + " needed before node " +
                              g.name(v));
    }
    for (Eigen::Index j = 0; j < k; ++j) sys.a(i, j) = entry(yi, pa[static_cast<std::size_t>(j)]);
    sys.b(i) = entry(yi, v);
  }
  return sys;
}

/// Solves the per-node systems in Y.order. Throws SingularSystem.
template <typename Scalar>
Matrix<Scalar> recover_lambda(const MixedGraph& g, const IdentifyingSets& y,
                              const Matrix<Scalar>& sigma, double tol = 1e-12) {
  const int n = g.size();
  if (sigma.rows() != n || sigma.cols() != n) throw std::invalid_argument("Sigma has wrong size");
  Matrix<Scalar> lambda = Matrix<Scalar>::Zero(n, n);
  std::uint32_t finished = 0;
  for (NodeId v : y.order) {
    const auto pa = g.parents(v);
    if (!pa.empty()) {
      auto sys = build_linear_system<Scalar>(g, y, v, sigma, lambda, finished);
      Vector<Scalar> x;
      if (!solve_square<Scalar>(sys.a, sys.b, x, tol)) {
        throw SingularSystem(v, "singular system at node " + g.name(v));
      }
      for (std::size_t j = 0; j < pa.size(); ++j) lambda(pa[j], v) = x(static_cast<Eigen::Index>(j));
    }
    finished |= 1u << v;
  }
  return lambda;
}

template <typename Scalar>
Matrix<Scalar> recover_omega(const Matrix<Scalar>& lambda, const Matrix<Scalar>& sigma) {
  const Matrix<Scalar> m = Matrix<Scalar>::Identity(lambda.rows(), lambda.cols()) - lambda;
  return (m.transpose() * sigma * m).eval();
}

/// (I - Lambda)^{-T} Omega (I - Lambda)^{-1}. Throws NonInvertible.
template <typename Scalar>
Matrix<Scalar> phi(const Matrix<Scalar>& lambda, const Matrix<Scalar>& omega) {
  const Matrix<Scalar> m = Matrix<Scalar>::Identity(lambda.rows(), lambda.cols()) - lambda;
  const Matrix<Scalar> inv = inverse<Scalar>(m);
  Matrix<Scalar> s = inv.transpose() * omega * inv;
  if constexpr (!is_exact_v<Scalar>) s = ((s + s.transpose()) / 2).eval();
  return s;
}

enum class Membership { Inside, Outside, NonGeneric };

/// Numeric model membership; tol is relative to the largest |Sigma| entry.
Membership membership(const MixedGraph& g, const IdentifyingSets& y, const Eigen::MatrixXd& sigma,
                      double tol = 1e-8);

}  // namespace mixsem

#endif  // MIXSEM_HTC_HPP
