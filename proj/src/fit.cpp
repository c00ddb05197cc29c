#include "mixsem/fit.hpp"

#include "mixsem/graph_io.hpp"
#include "mixsem/parallel.hpp"
#include "mixsem/random.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mixsem {

namespace {

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    names.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i + 1));
  }
  return names;
}

bool is_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

CsvTable read_csv(const std::string& text) {
  CsvTable t;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      for (const auto& h : t.header) {
        if (h.empty()) throw DataError("line " + std::to_string(line_no) + ": empty column name");
      }
      continue;
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw DataError("empty CSV");
  return t;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parameters and their loglik in the (I - Lambda), Omega form.
struct State {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd omega;
};

bool state_loglik(const State& st, const Eigen::MatrixXd& s, long n_samples, double& out) {
  const auto n = s.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(st.omega);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) - st.lambda;
  const Eigen::MatrixXd inner = b.transpose() * s * b;
  double logdet = 0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2 * std::log(llt.matrixL()(i, i));
  const double tr = llt.solve(inner).trace();
  out = -0.5 * static_cast<double>(n_samples) *
        (static_cast<double>(n) * std::log(2 * std::numbers::pi) + logdet + tr);
  return std::isfinite(out);
}

// One conditional update of Lambda column i and Omega row i.
bool update_node(const MixedGraph& g, NodeId i, State& st, const Eigen::MatrixXd& s) {
  const int n = g.size();
  const auto pa = g.parents(i);
  const auto sp = g.siblings(i);
  const auto k1 = static_cast<Eigen::Index>(pa.size());
  const auto k2 = static_cast<Eigen::Index>(sp.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k1 + k2, n);
  for (Eigen::Index j = 0; j < k1; ++j) m(j, pa[static_cast<std::size_t>(j)]) = 1;

  std::vector<int> others;
  Eigen::MatrixXd omega_oo_inv;
  if (k2 > 0) {
    for (int j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    const Eigen::MatrixXd omega_oo = st.omega(others, others);
    Eigen::LLT<Eigen::MatrixXd> llt(omega_oo);
    if (llt.info() != Eigen::Success) return false;
    omega_oo_inv = llt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
    // residuals of the other nodes, as rows over X
    const Eigen::MatrixXd eps = (Eigen::MatrixXd::Identity(n, n) - st.lambda).transpose()(others, Eigen::all);
    const Eigen::MatrixXd z = omega_oo_inv * eps;
    for (Eigen::Index t = 0; t < k2; ++t) {
      const NodeId w = sp[static_cast<std::size_t>(t)];
      const auto pos = std::find(others.begin(), others.end(), w) - others.begin();
      m.row(k1 + t) = z.row(pos);
    }
  }

  double resid = s(i, i);
  Eigen::VectorXd coef;
  if (k1 + k2 > 0) {
    const Eigen::MatrixXd c = m * s * m.transpose();
    const Eigen::VectorXd rhs = m * s.col(i);
    // min-norm solve: at bows the parent and spouse columns can be collinear,
    // and any solution of the normal equations is a conditional maximum
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c);
    cod.setThreshold(1e-12);
    coef = cod.solve(rhs);
    resid -= rhs.dot(coef);
  }
  if (!(resid > 1e-14 * s(i, i)) || !coef.allFinite()) return false;

  for (Eigen::Index j = 0; j < k1; ++j) st.lambda(pa[static_cast<std::size_t>(j)], i) = coef(j);
  double omega_ii = resid;
  if (k2 > 0) {
    for (Eigen::Index t = 0; t < k2; ++t) {
      const NodeId w = sp[static_cast<std::size_t>(t)];
      st.omega(i, w) = st.omega(w, i) = coef(k1 + t);
    }
    Eigen::VectorXd w_o(n - 1);
    for (int j = 0; j < n - 1; ++j) w_o(j) = st.omega(i, others[static_cast<std::size_t>(j)]);
    omega_ii += w_o.dot(omega_oo_inv * w_o);
  }
  st.omega(i, i) = omega_ii;
  return true;
}

State initial_state(const MixedGraph& g, const Eigen::MatrixXd& s, int attempt, std::uint64_t seed) {
  const int n = g.size();
  State st{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  if (attempt == 0) {
    st.omega = s.diagonal().asDiagonal();
    return st;
  }
  auto rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& e : g.directed()) {
    st.lambda(e.tail, e.head) = normal(rng) * std::sqrt(s(e.head, e.head) / s(e.tail, e.tail));
  }
  for (const auto& e : g.bidirected()) {
    st.omega(e.a, e.b) = st.omega(e.b, e.a) = normal(rng) * std::sqrt(s(e.a, e.a) * s(e.b, e.b));
  }
  for (int v = 0; v < n; ++v) st.omega(v, v) = s(v, v) + st.omega.row(v).cwiseAbs().sum();
  return st;
}

FitResult finish(const State& st, double ll, int iterations, bool converged, int attempt, int violations) {
  FitResult r;
  r.params = {st.lambda, st.omega};
  r.loglik = ll;
  r.iterations = iterations;
  r.converged = converged;
  r.restarts_used = attempt;
  r.ascent_violations = violations;
  try {
    r.sigma_hat = phi<double>(st.lambda, st.omega);
  } catch (const NonInvertible&) {
    r.converged = false;
  }
  return r;
}

FitResult run_attempt(const MixedGraph& g, const SampleCov& data, const FitOptions& opts, int attempt,
                      bool dag) {
  const int n = g.size();
  State st = initial_state(g, data.S, attempt, opts.seed);
  double ll = 0;
  if (!state_loglik(st, data.S, data.N, ll)) return finish(st, -INFINITY, 0, false, attempt, 0);
  int violations = 0;
  const int max_iter = dag ? 1 : opts.max_iter;
  for (int it = 1; it <= max_iter; ++it) {
    const double start = ll;
    for (NodeId i = 0; i < n; ++i) {
      if (!update_node(g, i, st, data.S)) return finish(st, -INFINITY, it, false, attempt, violations);
      double next = 0;
      if (!state_loglik(st, data.S, data.N, next)) return finish(st, -INFINITY, it, false, attempt, violations);
      if (next < ll - 1e-9 * std::max(1.0, std::abs(ll))) ++violations;
      ll = next;
    }
    if (dag || std::abs(ll - start) <= opts.tol * std::abs(start)) {
      return finish(st, ll, it, true, attempt, violations);
    }
  }
  return finish(st, ll, max_iter, false, attempt, violations);
}

}  // namespace

SampleCov SampleCov::subset(const std::vector<NodeId>& nodes) const {
  SampleCov out;
  out.S = S(nodes, nodes);
  out.N = N;
  for (NodeId v : nodes) out.names.push_back(names.at(static_cast<std::size_t>(v)));
  return out;
}

SampleCov make_sample_cov(Eigen::MatrixXd s, long n_samples, std::vector<std::string> names) {
  const auto n = s.rows();
  if (s.cols() != n || n == 0) throw DataError("covariance must be square and nonempty");
  if (names.empty()) names = default_names(static_cast<int>(n));
  if (static_cast<Eigen::Index>(names.size()) != n) throw DataError("name count differs from dimension");
  if (!s.allFinite()) throw DataError("covariance has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DataError("covariance is not symmetric");
  s = ((s + s.transpose()) / 2).eval();
  if (!is_pd(s)) throw NonPositiveDefinite("covariance is not positive definite");
  if (n_samples < n + 1) throw DataError("need N >= n + 1 samples");
  return SampleCov{std::move(s), n_samples, std::move(names)};
}

SampleCov sample_cov_from_data(const Eigen::MatrixXd& x, std::vector<std::string> names) {
  if (x.rows() == 0) throw DataError("no observations");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(x.rows());
  s = ((s + s.transpose()) / 2).eval();
  return make_sample_cov(std::move(s), static_cast<long>(x.rows()), std::move(names));
}

SampleCov parse_cov_csv(const std::string& text, long n_samples) {
  const auto t = read_csv(text);
  const auto n = static_cast<Eigen::Index>(t.header.size());
  if (static_cast<Eigen::Index>(t.rows.size()) != n) {
    throw DataError("covariance CSV needs " + std::to_string(n) + " rows, got " + std::to_string(t.rows.size()));
  }
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    auto fields = t.rows[static_cast<std::size_t>(r)];
    const std::string where = "line " + std::to_string(t.line_numbers[static_cast<std::size_t>(r)]) + ": ";
    // rows may start with their node label
    if (static_cast<Eigen::Index>(fields.size()) == n + 1) {
      if (fields[0] != t.header[static_cast<std::size_t>(r)]) throw DataError(where + "row label mismatch");
      fields.erase(fields.begin());
    }
    if (static_cast<Eigen::Index>(fields.size()) != n) throw DataError(where + "wrong number of fields");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!parse_number(fields[static_cast<std::size_t>(c)], s(r, c))) {
        throw DataError(where + "bad number '" + fields[static_cast<std::size_t>(c)] + "'");
      }
    }
  }
  return make_sample_cov(std::move(s), n_samples, t.header);
}

SampleCov parse_data_csv(const std::string& text) {
  const auto t = read_csv(text);
  const auto n = static_cast<Eigen::Index>(t.header.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t.rows.size()), n);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = "line " + std::to_string(t.line_numbers[r]) + ": ";
    if (static_cast<Eigen::Index>(t.rows[r].size()) != n) throw DataError(where + "wrong number of fields");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!parse_number(t.rows[r][static_cast<std::size_t>(c)], x(static_cast<Eigen::Index>(r), c))) {
        throw DataError(where + "bad number '" + t.rows[r][static_cast<std::size_t>(c)] + "'");
      }
    }
  }
  return sample_cov_from_data(x, t.header);
}

SampleCov read_cov_csv(const std::string& path, long n_samples) { return parse_cov_csv(slurp(path), n_samples); }
SampleCov read_data_csv(const std::string& path) { return parse_data_csv(slurp(path)); }

void write_data_csv(const std::string& path, const std::vector<std::string>& names, const Eigen::MatrixXd& x) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", x(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

double log_likelihood(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& s, long n_samples) {
  const auto n = s.rows();
  if (sigma_hat.rows() != n || sigma_hat.cols() != n || s.cols() != n) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_hat);
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite("SigmaHat is not positive definite");
  if (!is_pd(s)) throw NonPositiveDefinite("S is not positive definite");
  double logdet = 0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2 * std::log(llt.matrixL()(i, i));
  const double tr = llt.solve(s).trace();
  return -0.5 * static_cast<double>(n_samples) *
         (static_cast<double>(n) * std::log(2 * std::numbers::pi) + logdet + tr);
}

FitResult ricf_fit(const MixedGraph& g, const SampleCov& data, const FitOptions& opts) {
  if (g.size() != data.size()) throw DataError("graph and covariance differ in dimension");
  const auto flags = structure_predicates(g);
  if (!flags.is_acyclic) throw CyclicUnsupported("RICF needs an acyclic graph");
  if (flags.is_dag) return run_attempt(g, data, opts, 0, true);

  std::optional<FitResult> best;
  std::optional<FitResult> best_failed;
  int collected = 0;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    FitResult r = run_attempt(g, data, opts, attempt, false);
    if (r.converged) {
      if (!best || r.loglik > best->loglik) best = std::move(r);
      if (++collected >= std::max(1, opts.starts)) break;
    } else if (!best_failed || r.loglik > best_failed->loglik) {
      best_failed = std::move(r);
    }
  }
  if (best) return *best;
  throw NotConverged("RICF did not converge after " + std::to_string(opts.restarts) + " restarts",
                     std::move(*best_failed));
}

std::vector<MixedGraph> fit_candidates(const ClassEntry& entry, int n) {
  std::vector<MixedGraph> members;
  members.reserve(entry.members.size());
  for (GraphCode c : entry.members) members.push_back(decode(c, n));
  std::sort(members.begin(), members.end(), representative_before);
  std::vector<MixedGraph> out;
  std::vector<Skeleton> seen;
  for (auto& g : members) {
    auto sk = skeleton(g);
    if (std::find(seen.begin(), seen.end(), sk) != seen.end()) continue;
    seen.push_back(std::move(sk));
    out.push_back(std::move(g));
  }
  return out;
}

ClassFit fit_class(const std::vector<MixedGraph>& candidates, const SampleCov& data, const FitOptions& opts) {
  if (candidates.empty()) throw std::invalid_argument("fit_class: empty class");
  ClassFit out;
  std::optional<FitResult> best_failed;
  for (const auto& cand : candidates) {
    MixedGraph g = cand;
    if (g.names() != data.names) g = decode(encode(cand), data.names);
    out.attempted.push_back(encode(g));
    try {
      out.fit = ricf_fit(g, data, opts);
      out.member = encode(g);
      return out;
    } catch (const NotConverged& e) {
      if (!best_failed || e.best.loglik > best_failed->loglik) best_failed = e.best;
    }
  }
  throw NotConverged("no member of the class converged", std::move(*best_failed));
}

ClassFit fit_class(const ClassEntry& entry, const SampleCov& data, const FitOptions& opts) {
  return fit_class(fit_candidates(entry, data.size()), data, opts);
}

ParamPair<double> recover_params_via_equivalent(const MixedGraph& target, const MixedGraph& fitted,
                                                const FitResult& fit, double tol) {
  if (target.size() != fitted.size() || fit.sigma_hat.rows() != target.size()) {
    throw std::invalid_argument("recover_params_via_equivalent: dimension mismatch");
  }
  const auto status = find_identifying_sets(target);
  if (!status.identifiable) throw std::invalid_argument("target graph is not HTC-identifiable");
  const Eigen::MatrixXd lambda = recover_lambda<double>(target, status.sets, fit.sigma_hat);
  Eigen::MatrixXd omega = recover_omega<double>(lambda, fit.sigma_hat);
  const double scale = std::max(1.0, fit.sigma_hat.cwiseAbs().maxCoeff());
  double residual = 0;
  for (int v = 0; v < target.size(); ++v) {
    for (int w = 0; w < target.size(); ++w) {
      if (v == w || target.has_bidirected(v, w)) continue;
      residual = std::max(residual, std::abs(omega(v, w)));
      omega(v, w) = 0;
    }
  }
  if (residual > tol * scale) {
    throw NonGenericForModel("Omega has mass off the bidirected support", residual);
  }
  return {lambda, omega};
}

double bic(const FitResult& fit, int dimension, int n, long n_samples) {
  if (!fit.converged) return std::numeric_limits<double>::infinity();
  return -2 * fit.loglik + static_cast<double>(dimension + n) * std::log(static_cast<double>(n_samples));
}

double bic(const FitResult& fit, const ClassEntry& entry, long n_samples) {
  return bic(fit, entry.dimension, static_cast<int>(fit.params.lambda.rows()), n_samples);
}

std::vector<std::vector<MixedGraph>> fit_plan(const ClassTable& table) {
  std::vector<std::vector<MixedGraph>> plan;
  plan.reserve(table.classes.size());
  for (const auto& c : table.classes) plan.push_back(fit_candidates(c, table.n));
  return plan;
}

ScoreReport select_class(const ClassTable& table, const SampleCov& data, const SelectOptions& opts) {
  return select_class(table, fit_plan(table), data, opts);
}

ScoreReport select_class(const ClassTable& table, const std::vector<std::vector<MixedGraph>>& plan,
                         const SampleCov& data, const SelectOptions& opts) {
  if (table.n != data.size()) throw DataError("class table and data differ in node count");
  std::vector<int> ids;
  for (const auto& c : table.classes) {
    if (!opts.include || opts.include(c)) ids.push_back(c.id);
  }
  std::vector<ClassScore> scores(ids.size());
  parallel_for(ids.size(), opts.jobs, [&](std::size_t k) {
    const auto& entry = table.classes[static_cast<std::size_t>(ids[k])];
    FitOptions fo = opts.fit;
    fo.seed = make_rng(opts.fit.seed, static_cast<std::uint64_t>(entry.id))();
    ClassScore sc;
    sc.class_id = entry.id;
    sc.param_count = entry.dimension + data.size();
    try {
      const auto cf = fit_class(plan[static_cast<std::size_t>(entry.id)], data, fo);
      sc.loglik = cf.fit.loglik;
      sc.converged = true;
      sc.member = cf.member;
      sc.bic = bic(cf.fit, entry.dimension, data.size(), data.N);
    } catch (const NotConverged& e) {
      sc.loglik = e.best.loglik;
      sc.bic = std::numeric_limits<double>::infinity();
    }
    scores[k] = sc;
  });
  std::sort(scores.begin(), scores.end(), [](const ClassScore& a, const ClassScore& b) {
    if (a.bic != b.bic) return a.bic < b.bic;
    return a.class_id < b.class_id;
  });
  ScoreReport report;
  report.scores = std::move(scores);
  if (!report.scores.empty() && std::isfinite(report.scores.front().bic)) {
    report.best_class = report.scores.front().class_id;
    const double best = report.scores.front().bic;
    for (const auto& s : report.scores) {
      if (s.bic <= best + opts.tie_tol) report.ties.push_back(s.class_id);
    }
  }
  return report;
}

int best_among(const ScoreReport& report, const std::function<bool(int)>& keep) {
  for (const auto& s : report.scores) {
    if (std::isfinite(s.bic) && keep(s.class_id)) return s.class_id;
  }
  return -1;
}

bool is_mag_class(const ClassEntry& entry) {
  return std::all_of(entry.constraints.tags.begin(), entry.constraints.tags.end(), [](const ConstraintTag& t) {
    return t.kind == ConstraintTag::Kind::VanishingCovariance ||
           t.kind == ConstraintTag::Kind::VanishingPartialCorrelation;
  });
}

double partial_corr(const Eigen::MatrixXd& s, NodeId v, NodeId w, const std::vector<NodeId>& cond) {
  const auto n = static_cast<int>(s.rows());
  std::vector<int> idx{v, w};
  idx.insert(idx.end(), cond.begin(), cond.end());
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 0 || sorted.back() >= n) {
    throw std::invalid_argument("partial_corr: nodes must be distinct and in range");
  }
  const Eigen::MatrixXd sub = s(idx, idx);
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) throw NonPositiveDefinite("singular submatrix in partial correlation");
  const Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.cols()));
  return -p(0, 1) / std::sqrt(p(0, 0) * p(1, 1));
}

CiVerdict fisher_z_test(double r, long n_samples, int k, double alpha) {
  const long dof = n_samples - k - 3;
  if (dof <= 0) throw std::invalid_argument("fisher_z_test: need N > k + 3");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("fisher_z_test: alpha outside (0, 1)");
  r = std::clamp(r, -1 + 1e-15, 1 - 1e-15);
  const double z = std::atanh(r) * std::sqrt(static_cast<double>(dof));
  const double q = boost::math::quantile(boost::math::normal(), 1 - alpha / 2);
  return std::abs(z) > q ? CiVerdict::Dependent : CiVerdict::Independent;
}

double prop2_product(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != 4 || sigma.cols() != 4) throw std::invalid_argument("prop2 needs a 4x4 matrix");
  if (!is_pd(sigma)) throw NonPositiveDefinite("Sigma is not positive definite");
  return partial_corr(sigma, 1, 2, {0}) * partial_corr(sigma, 2, 3, {0}) * partial_corr(sigma, 1, 3, {0});
}

bool prop2_holds(const Eigen::MatrixXd& sigma) { return prop2_product(sigma) <= 1e-12; }

namespace {
nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}
}  // namespace

nlohmann::json fit_result_to_json(const FitResult& fit, const MixedGraph& g) {
  nlohmann::json j;
  j["graph"] = graph_to_json(g);
  j["Lambda"] = matrix_json(fit.params.lambda);
  j["Omega"] = matrix_json(fit.params.omega);
  j["SigmaHat"] = matrix_json(fit.sigma_hat);
  j["loglik"] = fit.loglik;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["restarts_used"] = fit.restarts_used;
  return j;
}

nlohmann::json score_report_to_json(const ScoreReport& report) {
  nlohmann::json j;
  j["best_class"] = report.best_class;
  j["ties"] = report.ties;
  auto arr = nlohmann::json::array();
  for (const auto& s : report.scores) {
    nlohmann::json e;
    e["class_id"] = s.class_id;
    e["converged"] = s.converged;
    e["param_count"] = s.param_count;
    if (s.converged) {
      e["loglik"] = s.loglik;
      e["bic"] = s.bic;
      e["member"] = s.member;
    } else {
      e["loglik"] = nullptr;
      e["bic"] = "inf";
    }
    arr.push_back(e);
  }
  j["scores"] = arr;
  return j;
}

}  // namespace mixsem
