#ifndef MIXSEM_SIMULATE_HPP
#define MIXSEM_SIMULATE_HPP

#include "mixsem/graph.hpp"
#include "mixsem/htc.hpp"

#include <json.hpp>

#include <random>
#include <span>
#include <string>
#include <vector>

namespace mixsem {

struct GeneratorOptions {
  double p_directed = 0.3;
  double p_bidirected = 0.15;
  double lambda_min = 0.3, lambda_max = 0.9;
  double omega_min = 0.2, omega_max = 0.5;
};

/// Parameterized graph. Plain edge lists since p may exceed MixedGraph's
/// bitmask width.
struct SemModel {
  int p = 0;
  std::vector<std::string> names;
  std::vector<DirectedEdge> directed;
  std::vector<BidirectedEdge> bidirected;
  ParamPair<double> params;

  Eigen::MatrixXd covariance() const { return phi<double>(params.lambda, params.omega); }
};

/// x1 .. xp
std::vector<std::string> numbered_names(int p);

/// Uniform random topological order, independent edge draws, weights on
/// +-[min, max], omega_vv = 1 + sum_w |omega_vw|.
SemModel random_sem(int p, std::mt19937_64& rng, const GeneratorOptions& opts = {});
/// Random parameters on a fixed small graph, same distributions.
SemModel random_params(const MixedGraph& g, std::mt19937_64& rng, const GeneratorOptions& opts = {});

/// N observations as rows.
Eigen::MatrixXd sample(const SemModel& m, long n_samples, std::mt19937_64& rng);

/// Latent projection onto `keep` (node i of the result is keep[i]).
MixedGraph latent_projection(const SemModel& m, std::span<const NodeId> keep);

nlohmann::json sem_graph_to_json(const SemModel& m);
nlohmann::json sem_params_to_json(const SemModel& m);

}  // namespace mixsem

#endif  // MIXSEM_SIMULATE_HPP
