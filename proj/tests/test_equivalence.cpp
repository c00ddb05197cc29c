#include <doctest.h>

#include "fixtures.hpp"
#include "mixsem/equivalence.hpp"

#include <random>

using namespace mixsem;
using namespace fixtures;

namespace {

MixedGraph bow2() { return g("nodes: a b\na -> b\na <-> b\n"); }
MixedGraph union_graph() { return g("nodes: a b c\na -> b\nb -> c\na -> c\nb <-> c\n"); }

// [(I - L)^T S (I - L)]_{vw}
double omega_entry(const Eigen::MatrixXd& l, const Eigen::MatrixXd& s, int v, int w) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(l.rows(), l.cols()) - l;
  return (m.transpose() * s * m)(v, w);
}

}  // namespace

TEST_CASE("jacobian closed form") {
  const auto jb = jacobian_at<double>(bow2(), Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  CHECK(jb.rows() == 0);
  CHECK(jb.cols() == 1);
  MixedGraph e(2);
  e.add_directed(0, 1);
  const auto je = jacobian_at<double>(e, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(je.rows() == 1);
  CHECK(je(0, 0) == -1);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const auto all = enumerate_acyclic(4);
  for (int t = 0; t < 20; ++t) {
    const auto gr = decode(all[rng() % all.size()], 4);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& d : gr.directed()) l(d.tail, d.head) = nd(rng);
    Eigen::MatrixXd x(4, 4);
    for (int i = 0; i < 16; ++i) x(i) = nd(rng);
    const Eigen::MatrixXd s = x * x.transpose() + Eigen::MatrixXd::Identity(4, 4);
    const auto j = jacobian_at<double>(gr, l, s);
    const auto spec = jacobian_spec(gr);
    const double h = 1e-6;
    for (std::size_t c = 0; c < spec.cols.size(); ++c) {
      Eigen::MatrixXd lp = l, lm = l;
      lp(spec.cols[c].tail, spec.cols[c].head) += h;
      lm(spec.cols[c].tail, spec.cols[c].head) -= h;
      for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const auto [v, w] = spec.rows[r];
        const double fd = (omega_entry(lp, s, v, w) - omega_entry(lm, s, v, w)) / (2 * h);
        CHECK(std::abs(fd - j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) < 1e-6);
      }
    }
  }
}

TEST_CASE("generic rank") {
  const auto full = generic_rank(saturated_dag(4));
  CHECK(full.rank == 6);
  CHECK(full.deficiency == 0);
  const auto b = generic_rank(bow2());
  CHECK(b.rank == 0);
  CHECK(b.deficiency == 1);
  CHECK(generic_rank(union_graph()).deficiency == 1);
  CHECK_THROWS_AS(generic_rank(bow2(), 0), std::invalid_argument);
}

TEST_CASE("finite-to-one and dimension") {
  CHECK(is_finite_to_one(instrumental()));
  CHECK_FALSE(is_finite_to_one(bow2()));
  CHECK(is_finite_to_one(inconclusive_a()));
  CHECK(model_dimension(MixedGraph(4)) == 0);
  CHECK(model_dimension(worked_example()) == 5);
  CHECK(model_dimension(saturated_dag(4)) == 6);
}

TEST_CASE("deletion equivalents") {
  const auto eq = theorem2_equivalents(union_graph());
  auto contains = [&](const MixedGraph& h) { return std::find(eq.begin(), eq.end(), h) != eq.end(); };
  CHECK(contains(instrumental()));
  CHECK(contains(triangle_dag()));
  const auto bw = theorem2_equivalents(bow2());
  REQUIRE(bw.size() == 2);
  CHECK(std::find(bw.begin(), bw.end(), g("nodes: a b\na -> b\n")) != bw.end());
  CHECK(std::find(bw.begin(), bw.end(), g("nodes: a b\na <-> b\n")) != bw.end());
  CHECK_THROWS_AS(theorem2_equivalents(instrumental()), std::invalid_argument);
  CHECK(min_deletion_distance(union_graph()) == 1);
}

TEST_CASE("small censuses") {
  // oracle for n = 2: the empty graph is alone, the five others reach a single edge
  const auto c2 = cluster_all(2);
  REQUIRE(c2.clusters.size() == 2);
  CHECK(c2.clusters[0] == std::vector<int>{0});
  CHECK(c2.clusters[1].size() == 5);
  const auto t2 = merge_clusters(c2);
  CHECK(t2.classes.size() == 2);
  // pinned from a first exact run
  const auto c3 = cluster_all(3);
  CHECK(c3.clusters.size() == 11);
  CHECK(merge_clusters(c3).classes.size() == 11);
}

TEST_CASE("class table JSON round trip") {
  const auto t = build_class_table(3);
  const auto j = class_table_to_json(t);
  const auto back = class_table_from_json(j);
  CHECK(back.classes.size() == t.classes.size());
  CHECK(class_table_to_json(back) == j);
  CHECK_THROWS_AS(class_table_from_json(nlohmann::json::parse(R"({"n":3})")), DataError);
}

TEST_CASE("skeleton and collider check") {
  const auto chain = g("nodes: a b c\na -> b\nb -> c\n");
  const auto fork = g("nodes: a b c\nb -> a\nb -> c\n");
  const auto collider = g("nodes: a b c\na -> b\nc -> b\n");
  CHECK(prop1_check(chain, fork));
  CHECK_FALSE(prop1_check(chain, collider));
  CHECK_FALSE(prop1_check(g("nodes: a b c\na -> b\nb <-> c\n"), chain));
  CHECK_FALSE(prop1_check(bow2(), bow2()));
}
