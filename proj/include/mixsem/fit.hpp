#ifndef MIXSEM_FIT_HPP
#define MIXSEM_FIT_HPP

#include "mixsem/equivalence.hpp"
#include "mixsem/graph.hpp"
#include "mixsem/htc.hpp"
#include "mixsem/scalar.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mixsem {

class NonPositiveDefinite : public DataError {
 public:
  using DataError::DataError;
};

class CyclicUnsupported : public Error {
 public:
  using Error::Error;
};

/// Sample covariance with maximum-likelihood normalization (divides by N).
struct SampleCov {
  Eigen::MatrixXd S;
  long N = 0;
  std::vector<std::string> names;

  int size() const { return static_cast<int>(S.rows()); }
  /// Restriction to the given nodes, in the given order.
  SampleCov subset(const std::vector<NodeId>& nodes) const;
};

/// Validates symmetry (1e-12), positive definiteness and N >= n + 1.
/// Throws DataError / NonPositiveDefinite.
SampleCov make_sample_cov(Eigen::MatrixXd s, long n_samples, std::vector<std::string> names);
/// Rows are observations.
SampleCov sample_cov_from_data(const Eigen::MatrixXd& x, std::vector<std::string> names);

/// CSV with a header of node names. Covariance files need N from the caller.
SampleCov parse_cov_csv(const std::string& text, long n_samples);
SampleCov parse_data_csv(const std::string& text);
SampleCov read_cov_csv(const std::string& path, long n_samples);
SampleCov read_data_csv(const std::string& path);
void write_data_csv(const std::string& path, const std::vector<std::string>& names,
                    const Eigen::MatrixXd& x);

/// -(N/2) (n log 2 pi + log det SigmaHat + tr(S SigmaHat^{-1})).
double log_likelihood(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& s, long n_samples);

struct FitOptions {
  double tol = 1e-8;   // relative loglik change per sweep
  int max_iter = 1000;
  int restarts = 10;
  std::uint64_t seed = kDefaultSeed;
  int starts = 1;      // converged attempts to collect before keeping the best
};

struct FitResult {
  ParamPair<double> params;
  Eigen::MatrixXd sigma_hat;
  double loglik = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
  int ascent_violations = 0;  // node updates that lowered the loglik
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& msg, FitResult best_attempt)
      : Error(msg), best(std::move(best_attempt)) {}
  FitResult best;
};

/// Residual iterative conditional fitting. DAGs take the closed-form
/// regression path (iterations = 1). Throws NotConverged, CyclicUnsupported.
FitResult ricf_fit(const MixedGraph& g, const SampleCov& data, const FitOptions& opts = {});

/// Members tried by fit_class, in order: the preferred member (DAG, then
/// bow-free, then anything), then one member per remaining skeleton.
std::vector<MixedGraph> fit_candidates(const ClassEntry& entry, int n);

struct ClassFit {
  FitResult fit;
  GraphCode member = 0;             // labeled code of the member that converged
  std::vector<GraphCode> attempted;
};

/// Throws NotConverged (carrying the best attempt) once every candidate failed.
ClassFit fit_class(const ClassEntry& entry, const SampleCov& data, const FitOptions& opts = {});
ClassFit fit_class(const std::vector<MixedGraph>& candidates, const SampleCov& data,
                   const FitOptions& opts = {});

/// Omega off its support is larger than this relative tolerance.
class NonGenericForModel : public Error {
 public:
  NonGenericForModel(const std::string& msg, double r) : Error(msg), residual(r) {}
  double residual;
};

/// Maps a fitted SigmaHat to parameters of an HTC-identifiable target graph.
ParamPair<double> recover_params_via_equivalent(const MixedGraph& target, const MixedGraph& fitted,
                                                const FitResult& fit, double tol = 1e-8);

/// d = dimension + n; +inf for an unconverged fit.
double bic(const FitResult& fit, int dimension, int n, long n_samples);
double bic(const FitResult& fit, const ClassEntry& entry, long n_samples);

struct ClassScore {
  int class_id = 0;
  double loglik = 0;
  int param_count = 0;
  double bic = 0;
  bool converged = false;
  GraphCode member = 0;
};

struct ScoreReport {
  std::vector<ClassScore> scores;  // BIC ascending, then class id
  int best_class = -1;
  std::vector<int> ties;           // classes within 1e-6 of the best BIC, best included
};

struct SelectOptions {
  FitOptions fit;
  int jobs = 1;
  std::function<bool(const ClassEntry&)> include;  // empty: all classes
  double tie_tol = 1e-6;
};

/// Candidate lists for every class of a table, reusable across selections.
std::vector<std::vector<MixedGraph>> fit_plan(const ClassTable& table);

/// Each class fit uses the stream (opts.fit.seed, class id).
ScoreReport select_class(const ClassTable& table, const SampleCov& data, const SelectOptions& opts = {});
ScoreReport select_class(const ClassTable& table, const std::vector<std::vector<MixedGraph>>& plan,
                         const SampleCov& data, const SelectOptions& opts = {});

/// Best class of a report among those accepted by `keep`, or -1.
int best_among(const ScoreReport& report, const std::function<bool(int)>& keep);

/// Every constraint is a vanishing covariance or partial correlation.
bool is_mag_class(const ClassEntry& entry);

/// Partial correlation of v and w given cond, from the inverse of the
/// submatrix. Throws NonPositiveDefinite on a singular submatrix.
double partial_corr(const Eigen::MatrixXd& s, NodeId v, NodeId w, const std::vector<NodeId>& cond = {});

enum class CiVerdict { Independent, Dependent };

/// Two-sided Fisher z test of r with k conditioning variables.
CiVerdict fisher_z_test(double r, long n_samples, int k, double alpha);

/// rho_bc.a * rho_cd.a * rho_bd.a on nodes a, b, c, d = 0..3.
double prop2_product(const Eigen::MatrixXd& sigma);
bool prop2_holds(const Eigen::MatrixXd& sigma);

nlohmann::json fit_result_to_json(const FitResult& fit, const MixedGraph& g);
nlohmann::json score_report_to_json(const ScoreReport& report);

}  // namespace mixsem

#endif  // MIXSEM_FIT_HPP
