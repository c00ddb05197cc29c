#ifndef MIXSEM_EQUIVALENCE_HPP
#define MIXSEM_EQUIVALENCE_HPP

#include "mixsem/constraints.hpp"
#include "mixsem/graph.hpp"
#include "mixsem/htc.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixsem {

/// Rows: pairs {v,w}, v < w, not in B. Columns: directed edges of g.
struct JacobianSpec {
  std::vector<std::pair<NodeId, NodeId>> rows;
  std::vector<DirectedEdge> cols;
};

JacobianSpec jacobian_spec(const MixedGraph& g);

/// Derivative of [(I - Lambda)^T Sigma (I - Lambda)]_{vw} with respect to
/// lambda_ux, at fixed Sigma.
template <typename Scalar>
Matrix<Scalar> jacobian_at(const MixedGraph& g, const Matrix<Scalar>& lambda, const Matrix<Scalar>& sigma) {
  const auto spec = jacobian_spec(g);
  const Matrix<Scalar> m = sigma * (Matrix<Scalar>::Identity(g.size(), g.size()) - lambda);
  Matrix<Scalar> j = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(spec.rows.size()),
                                          static_cast<Eigen::Index>(spec.cols.size()));
  for (std::size_t r = 0; r < spec.rows.size(); ++r) {
    const auto [v, w] = spec.rows[r];
    for (std::size_t c = 0; c < spec.cols.size(); ++c) {
      const auto [u, x] = spec.cols[c];
      Scalar e(0);
      if (x == v) e -= m(u, w);
      if (x == w) e -= m(u, v);
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = e;
    }
  }
  return j;
}

struct RankReport {
  int rank = 0;
  int deficiency = 0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Maximum exact Jacobian rank over `trials` random integer parameter draws.
RankReport generic_rank(const MixedGraph& g, int trials = 3, std::uint64_t seed = kDefaultSeed);
bool is_finite_to_one(const MixedGraph& g, int trials = 3, std::uint64_t seed = kDefaultSeed);
/// generic rank + |B|, i.e. dimension on the correlation scale.
int model_dimension(const MixedGraph& g, int trials = 3, std::uint64_t seed = kDefaultSeed);

/// Deficiency oracle for subgraphs; defaults to generic_rank.
using DeficiencyFn = std::function<int(const MixedGraph&)>;

/// All finite-to-one graphs obtained by deleting exactly deficiency(g) edges
/// (the two edges of a bow count separately). Throws std::invalid_argument
/// when g is finite-to-one, InvariantViolation when the result is empty.
std::vector<MixedGraph> theorem2_equivalents(const MixedGraph& g, const DeficiencyFn& deficiency = {});

/// Smallest number of deleted edges giving a finite-to-one graph.
int min_deletion_distance(const MixedGraph& g, const DeficiencyFn& deficiency = {});

struct Census {
  int n = 0;
  std::vector<GraphCode> codes;   // every acyclic graph, increasing
  std::vector<int> rank;          // parallel to codes
  std::vector<int> directed;      // |D|, parallel to codes
  std::vector<int> bidirected;    // |B|, parallel to codes
  std::vector<int> cluster;       // cluster index per graph
  std::vector<std::vector<int>> clusters;  // graph indices, ordered by smallest code

  int index_of(GraphCode code) const;
  int deficiency(int i) const {
    return directed[static_cast<std::size_t>(i)] - rank[static_cast<std::size_t>(i)];
  }
  int dimension(int i) const { return rank[static_cast<std::size_t>(i)] + bidirected[static_cast<std::size_t>(i)]; }
};

/// Ranks every acyclic graph on n nodes and unions each infinite-to-one graph
/// with its deletion equivalents.
Census cluster_all(int n, int trials = 3, std::uint64_t seed = kDefaultSeed);

class MissingRepresentative : public Error {
 public:
  using Error::Error;
};

struct ClassEntry {
  int id = 0;
  std::vector<GraphCode> members;
  int dimension = 0;
  std::optional<MixedGraph> representative;
  IdentifyingSets identifying_sets;
  ConstraintSet constraints;
  std::vector<int> clusters;  // census cluster indices merged into this class
};

struct MergeEvent {
  int cluster_a = 0;
  int cluster_b = 0;
  bool identical_constraints = false;  // otherwise mutual vanishing
};

struct ClassTable {
  int n = 0;
  std::size_t graph_count = 0;
  std::size_t cluster_count = 0;
  std::vector<ClassEntry> classes;
  std::vector<MergeEvent> merges;

  /// Class id of a labeled graph code, or -1.
  int class_of(GraphCode code) const;
};

/// Preference for representatives: DAG, then bow-free, then fewer edges,
/// then smaller code.
bool representative_before(const MixedGraph& a, const MixedGraph& b);

ClassTable merge_clusters(const Census& census, std::uint64_t seed = kDefaultSeed);
ClassTable build_class_table(int n, int trials = 3, std::uint64_t seed = kDefaultSeed);

nlohmann::json class_table_to_json(const ClassTable& t);
ClassTable class_table_from_json(const nlohmann::json& j);

/// Both graphs bow-free and acyclic with equal skeletons and the same
/// colliders on every two-edge skeleton path.
bool prop1_check(const MixedGraph& g1, const MixedGraph& g2);

}  // namespace mixsem

#endif  // MIXSEM_EQUIVALENCE_HPP
