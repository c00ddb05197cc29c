#include <doctest.h>

#include "fixtures.hpp"
#include "mixsem/fit.hpp"
#include "mixsem/random.hpp"
#include "mixsem/simulate.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace mixsem;
using namespace fixtures;

namespace {

SampleCov simulate_cov(const MixedGraph& gr, long n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  const auto m = random_params(gr, rng);
  return sample_cov_from_data(sample(m, n, rng), gr.names());
}

Eigen::MatrixXd random_pd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) x(i, j) = nd(rng);
  }
  return x * x.transpose() + Eigen::MatrixXd::Identity(n, n);
}

// Sum of per-node least-squares regressions on centered data.
double factorized_loglik(const MixedGraph& gr, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const double n = static_cast<double>(x.rows());
  double ll = 0;
  for (int v = 0; v < gr.size(); ++v) {
    const auto pa = gr.parents(v);
    Eigen::VectorXd r = xc.col(v);
    if (!pa.empty()) {
      const Eigen::MatrixXd design = xc(Eigen::all, pa);
      const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(xc.col(v));
      r -= design * beta;
    }
    const double var = r.squaredNorm() / n;
    ll += -0.5 * n * (std::log(2 * std::numbers::pi * var) + 1);
  }
  return ll;
}

MixedGraph random_graph(std::mt19937_64& rng, int n, double p_dir, double p_bi) {
  GeneratorOptions o;
  o.p_directed = p_dir;
  o.p_bidirected = p_bi;
  const auto m = random_sem(n, rng, o);
  std::vector<NodeId> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return decode(encode(latent_projection(m, all)), n);
}

}  // namespace

TEST_CASE("log likelihood formula") {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(log_likelihood(i2, i2, 10) == doctest::Approx(-10 * (std::log(2 * std::numbers::pi) + 1)).epsilon(1e-14));
  CHECK_THROWS_AS(log_likelihood(-i2, i2, 10), NonPositiveDefinite);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd s = random_pd(4, rng);
    const Eigen::MatrixXd other = random_pd(4, rng);
    CHECK(log_likelihood(other, s, 50) <= log_likelihood(s, s, 50));
    std::vector<int> perm{2, 0, 3, 1};
    CHECK(log_likelihood(other(perm, perm), s(perm, perm), 50) ==
          doctest::Approx(log_likelihood(other, s, 50)).epsilon(1e-12));
  }
}

TEST_CASE("sample covariance validation") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  CHECK(make_sample_cov(s, 10, {}).names == std::vector<std::string>{"a", "b", "c"});
  CHECK_THROWS_AS(make_sample_cov(s, 3, {}), DataError);
  Eigen::MatrixXd asym = s;
  asym(0, 1) = 1e-6;
  CHECK_THROWS_AS(make_sample_cov(asym, 10, {}), DataError);
  Eigen::MatrixXd npd = s;
  npd(0, 1) = npd(1, 0) = 2;
  CHECK_THROWS_AS(make_sample_cov(npd, 10, {}), NonPositiveDefinite);
  CHECK_THROWS_AS(make_sample_cov(s, 10, {"a", "b"}), DataError);
}

TEST_CASE("csv loaders") {
  const auto c = parse_cov_csv("x,y\n2,0.5\n0.5,1\n", 20);
  CHECK(c.names == std::vector<std::string>{"x", "y"});
  CHECK(c.S(0, 1) == 0.5);
  CHECK(c.N == 20);
  const auto labeled = parse_cov_csv("x,y\nx,2,0.5\ny,0.5,1\n", 20);
  CHECK(labeled.S == c.S);
  try {
    parse_cov_csv("x,y\n2,0.5\n0.5,oops\n", 20);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_cov_csv("x,y\n2,0.5\n", 20), DataError);

  const auto d = parse_data_csv("u,v\n1,2\n3,5\n2,1\n");
  CHECK(d.N == 3);
  CHECK(d.S(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(d.S(0, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_data_csv("u,v\n1\n"), DataError);
}

TEST_CASE("DAG fits are closed-form in one sweep") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const auto gr = random_graph(rng, 4, 0.6, 0.0);
    auto prng = make_rng(100, static_cast<std::uint64_t>(t));
    const auto m = random_params(gr, prng);
    const Eigen::MatrixXd x = sample(m, 500, prng);
    const auto data = sample_cov_from_data(x, gr.names());
    const auto fit = ricf_fit(gr, data);
    CHECK(fit.converged);
    CHECK(fit.iterations == 1);
    CHECK(std::abs(fit.loglik - factorized_loglik(gr, x)) < 1e-10);
    CHECK(std::abs(fit.loglik - log_likelihood(fit.sigma_hat, data.S, data.N)) < 1e-9);
  }
  const auto sat = saturated_dag(4);
  const auto data = simulate_cov(sat, 200, 7);
  const auto fit = ricf_fit(sat, data);
  CHECK((fit.sigma_hat - data.S).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("RICF ascent and support") {
  std::mt19937_64 rng(21);
  int fitted = 0;
  for (int t = 0; t < 40; ++t) {
    const auto gr = random_graph(rng, 4, 0.4, 0.4);
    const auto data = simulate_cov(gr, 1000, 500 + static_cast<std::uint64_t>(t));
    try {
      const auto fit = ricf_fit(gr, data);
      ++fitted;
      CHECK(fit.ascent_violations == 0);
      for (int v = 0; v < 4; ++v) {
        for (int w = 0; w < 4; ++w) {
          if (!gr.has_directed(v, w)) CHECK(fit.params.lambda(v, w) == 0);
          if (v != w && !gr.has_bidirected(v, w)) CHECK(fit.params.omega(v, w) == 0);
        }
      }
      CHECK(Eigen::LLT<Eigen::MatrixXd>(fit.sigma_hat).info() == Eigen::Success);
    } catch (const NotConverged& e) {
      CHECK(e.best.ascent_violations == 0);
    }
  }
  CHECK(fitted >= 30);

  MixedGraph cyc(2);
  cyc.add_directed(0, 1);
  cyc.add_directed(1, 0);
  CHECK_THROWS_AS(ricf_fit(cyc, make_sample_cov(Eigen::MatrixXd::Identity(2, 2), 10, {})), CyclicUnsupported);
}

TEST_CASE("well-specified instrumental model") {
  const auto gr = instrumental();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto rng = make_rng(seed);
    const auto m = random_params(gr, rng);
    const auto data = sample_cov_from_data(sample(m, 10000, rng), gr.names());
    const auto fit = ricf_fit(gr, data);
    CHECK(fit.converged);
    CHECK(fit.ascent_violations == 0);
    CHECK(fit.loglik >= log_likelihood(m.covariance(), data.S, data.N) - 1e-6);
  }
}

TEST_CASE("parameters through an equivalent graph") {
  const auto data = simulate_cov(triangle_dag(), 300, 9);
  const auto fit = ricf_fit(triangle_dag(), data);
  const auto p = recover_params_via_equivalent(instrumental(), triangle_dag(), fit);
  CHECK((phi<double>(p.lambda, p.omega) - fit.sigma_hat).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(p.lambda(0, 2) == 0);

  const auto same = recover_params_via_equivalent(triangle_dag(), triangle_dag(), fit);
  CHECK((same.lambda - fit.params.lambda).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((same.omega - fit.params.omega).cwiseAbs().maxCoeff() < 1e-9);

  // a saturated fit on generic data does not satisfy the worked-example constraint
  const auto d4 = simulate_cov(saturated_dag(4), 300, 10);
  const auto f4 = ricf_fit(saturated_dag(4), d4);
  CHECK_THROWS_AS(recover_params_via_equivalent(worked_example(), saturated_dag(4), f4), NonGenericForModel);
}

TEST_CASE("bic penalty") {
  const auto data = make_sample_cov(Eigen::MatrixXd::Identity(4, 4), 100, {});
  const auto fit = ricf_fit(MixedGraph(4), data);
  CHECK(bic(fit, 0, 4, 100) == doctest::Approx(-2 * fit.loglik + 4 * std::log(100.0)));
  CHECK(bic(fit, 6, 4, 100) == doctest::Approx(-2 * fit.loglik + 10 * std::log(100.0)));
  CHECK(bic(fit, 6, 4, 100) > bic(fit, 3, 4, 100));
  FitResult bad = fit;
  bad.converged = false;
  CHECK(std::isinf(bic(bad, 0, 4, 100)));
}

TEST_CASE("member fallback across skeletons") {
  // a bow graph cannot converge in one sweep; the DAG after it takes over
  const auto bow = bow_merge_a();
  MixedGraph dag(4);
  dag.add_directed(0, 1);
  const auto data = simulate_cov(bow, 2000, 4);
  FitOptions o;
  o.max_iter = 1;
  o.restarts = 0;
  const auto cf = fit_class(std::vector<MixedGraph>{bow, dag}, data, o);
  CHECK(cf.attempted.size() == 2);
  CHECK(cf.member == encode(dag));
  CHECK_THROWS_AS(fit_class(std::vector<MixedGraph>{bow}, data, o), NotConverged);
}

TEST_CASE("partial correlations and Fisher z") {
  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  CHECK(partial_corr(i3, 0, 2, {1}) == 0);
  CHECK(fisher_z_test(0.0, 100, 1, 0.5) == CiVerdict::Independent);

  // chain a -> b -> c with unit noise
  const double l1 = 0.7, l2 = -0.4;
  Eigen::MatrixXd s(3, 3);
  const double vb = l1 * l1 + 1;
  s << 1, l1, l1 * l2, l1, vb, l2 * vb, l1 * l2, l2 * vb, l2 * l2 * vb + 1;
  CHECK(std::abs(partial_corr(s, 0, 2, {1})) < 1e-14);
  CHECK(std::abs(partial_corr(s, 0, 2)) > 0.1);

  CHECK(fisher_z_test(0.5, 100, 0, 0.01) == CiVerdict::Dependent);
  CHECK(fisher_z_test(0.2, 100, 0, 0.01) == CiVerdict::Independent);  // z = 1.99
  CHECK_THROWS_AS(fisher_z_test(0.5, 4, 1, 0.01), std::invalid_argument);

  Eigen::MatrixXd sing = Eigen::MatrixXd::Ones(3, 3);
  CHECK_THROWS_AS(partial_corr(sing, 0, 1, {2}), NonPositiveDefinite);
}

TEST_CASE("inequality constraint on partial correlations") {
  Eigen::MatrixXd counter = Eigen::MatrixXd::Identity(4, 4);
  for (int i = 1; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) counter(i, j) = counter(j, i) = 0.5;
  }
  CHECK(prop2_product(counter) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK_FALSE(prop2_holds(counter));
  CHECK(prop2_holds(Eigen::MatrixXd::Identity(4, 4)));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> scale(0.1, 10);
  for (int t = 0; t < 1000; ++t) {
    const auto m = random_params(inconclusive_a(), rng);
    const Eigen::MatrixXd sig = m.covariance();
    CHECK(prop2_holds(sig));
    Eigen::VectorXd d(4);
    for (int i = 0; i < 4; ++i) d(i) = scale(rng);
    CHECK(prop2_holds(d.asDiagonal() * sig * d.asDiagonal()) == prop2_holds(sig));
  }
  Eigen::VectorXd d(4);
  d << 3, 0.2, 5, 1.5;
  CHECK_FALSE(prop2_holds(d.asDiagonal() * counter * d.asDiagonal()));
}
