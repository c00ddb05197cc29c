#include "fixtures.hpp"
#include "mixsem/constraints.hpp"
#include "mixsem/equivalence.hpp"
#include "mixsem/fit.hpp"
#include "mixsem/htc.hpp"
#include "mixsem/random.hpp"
#include "mixsem/simulate.hpp"
#include "mixsem/ystruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace mixsem;
using namespace fixtures;

namespace {

constexpr std::uint64_t kSeed = 0xACCE97;

int failures = 0;

void run(int id, const char* name, const std::function<bool(std::ostringstream&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!ok) ++failures;
  std::printf("%s %2d %s:%s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name, detail.str().c_str(), secs);
  std::fflush(stdout);
}

const Census& census() {
  static const Census c = cluster_all(4);
  return c;
}

const ClassTable& table() {
  static const ClassTable t = merge_clusters(census());
  return t;
}

Polynomial s(const char* pair) { return sigma(pair[0] - 'a', pair[1] - 'a'); }

Eigen::MatrixXd random_lambda(const MixedGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 0.9);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (const auto& e : g.directed()) l(e.tail, e.head) = (rng() % 2 ? 1 : -1) * u(rng);
  return l;
}

Eigen::MatrixXd random_omega(const MixedGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 0.5);
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (const auto& e : g.bidirected()) o(e.a, e.b) = o(e.b, e.a) = (rng() % 2 ? 1 : -1) * u(rng);
  for (int v = 0; v < g.size(); ++v) o(v, v) = 1 + o.row(v).cwiseAbs().sum();
  return o;
}

std::vector<double> sigma_point(const Eigen::MatrixXd& m) {
  std::vector<double> pt(static_cast<std::size_t>(kSigmaVars));
  for (int v = 0; v < m.rows(); ++v) {
    for (int w = v; w < m.rows(); ++w) pt[static_cast<std::size_t>(sigma_var(v, w))] = m(v, w);
  }
  return pt;
}

// sum |coef| * max|sigma|^deg
double term_scale(const Polynomial& p, const Eigen::MatrixXd& m) {
  double c = 0;
  for (const auto& [mono, coef] : p.terms()) c += std::abs(coef.convert_to<double>());
  return c * std::pow(m.cwiseAbs().maxCoeff(), p.degree());
}

std::vector<MixedGraph> identifiable_sample(int count, std::uint64_t seed) {
  const auto all = enumerate_acyclic(4);
  auto rng = make_rng(seed);
  std::vector<MixedGraph> out;
  std::set<GraphCode> seen;
  while (static_cast<int>(out.size()) < count) {
    const GraphCode c = all[rng() % all.size()];
    if (!seen.insert(c).second) continue;
    auto g = decode(c, 4);
    if (find_identifying_sets(g).identifiable) out.push_back(std::move(g));
  }
  return out;
}

// -N/2 sum_v (log 2 pi s_v + 1), s_v the residual variance on pa(v)
double dag_closed_form(const MixedGraph& g, const SampleCov& d) {
  double ll = 0;
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto pa = g.parents(v);
    double var = d.S(v, v);
    if (!pa.empty()) {
      const Eigen::MatrixXd spp = d.S(pa, pa);
      const Eigen::VectorXd spv = d.S(pa, std::vector<int>{v});
      var -= spv.dot(spp.ldlt().solve(spv));
    }
    ll += -0.5 * static_cast<double>(d.N) * (std::log(2 * std::numbers::pi * var) + 1);
  }
  return ll;
}

SampleCov simulate_cov(const MixedGraph& g, long n, std::mt19937_64& rng) {
  const auto m = random_params(g, rng);
  return sample_cov_from_data(sample(m, n, rng), g.names());
}

}  // namespace

int main() {
  run(1, "census", [](std::ostringstream& out) {
    const std::size_t graphs = enumerate_acyclic(4).size();
    out << " graphs=" << graphs << " clusters=" << census().clusters.size() << " classes=" << table().classes.size();
    return graphs == 34752 && census().clusters.size() == 419 && table().classes.size() == 389;
  });

  run(2, "worked constraint", [](std::ostringstream& out) {
    const auto g = worked_example();
    const auto cs = theorem1_constraints(g, find_identifying_sets(g).sets);
    const auto worked_poly = canonicalize(s("aa") * s("bd") * s("bc") - s("aa") * s("bb") * s("cd") -
                                  s("ab") * s("ad") * s("bc") + s("ab") * s("ab") * s("cd"));
    out << " count=" << cs.polys.size();
    if (!cs.polys.empty()) out << " p=" << to_string(cs.polys[0], g.names());
    return cs.polys.size() == 1 && cs.polys[0] == worked_poly;
  });

  run(3, "htc witnesses", [](std::ostringstream& out) {
    const auto inst = instrumental();
    const bool inst_ok = find_identifying_sets(inst).identifiable &&
                         check_identifying_sets(inst, {0, 0b001, 0b001}).has_value();
    int inconclusive = 0, finite = 0;
    for (const auto& g : {inconclusive_a(), inconclusive_b(), inconclusive_c(), inconclusive_d()}) {
      inconclusive += !find_identifying_sets(g).identifiable;
      const auto r = generic_rank(g);
      finite += r.deficiency == 0 && is_finite_to_one(g);
    }
    const auto bow = parse_graph_text("nodes: a b\na -> b\na <-> b\n");
    const bool bow_inf = generic_rank(bow).deficiency > 0 && !is_finite_to_one(bow);
    out << " instrumental=" << inst_ok << " four inconclusive=" << inconclusive << "/4 finite-to-one=" << finite
        << "/4 bow infinite-to-one=" << bow_inf;
    return inst_ok && inconclusive == 4 && finite == 4 && bow_inf;
  });

  run(4, "constraint soundness", [](std::ostringstream& out) {
    const auto graphs = identifiable_sample(500, kSeed + 4);
    auto rng = make_rng(kSeed, 4);
    int polys = 0, symbolic_bad = 0;
    double worst = 0;
    for (const auto& g : graphs) {
      const auto cs = theorem1_constraints(g, find_identifying_sets(g).sets);
      for (const auto& p : cs.polys) {
        ++polys;
        if (!vanishes_on_model(p, g)) ++symbolic_bad;
      }
      for (int t = 0; t < 20 && !cs.polys.empty(); ++t) {
        const auto sig = phi<double>(random_lambda(g, rng), random_omega(g, rng));
        const auto pt = sigma_point(sig);
        for (const auto& p : cs.polys) worst = std::max(worst, std::abs(p.evaluate(pt)) / term_scale(p, sig));
      }
    }
    out << " graphs=" << graphs.size() << " polys=" << polys << " symbolic failures=" << symbolic_bad
        << " max |p|/scale=" << worst;
    return symbolic_bad == 0 && worst < 1e-8 && polys > 0;
  });

  run(5, "recovery round trip", [](std::ostringstream& out) {
    const auto graphs = identifiable_sample(50, kSeed + 5);
    auto rng = make_rng(kSeed, 5);
    double worst = 0;
    for (const auto& g : graphs) {
      const auto y = find_identifying_sets(g).sets;
      for (int t = 0; t < 100; ++t) {
        const auto l = random_lambda(g, rng);
        const auto o = random_omega(g, rng);
        const auto sig = phi<double>(l, o);
        const auto lr = recover_lambda<double>(g, y, sig);
        const auto om = recover_omega<double>(lr, sig);
        worst = std::max({worst, (lr - l).cwiseAbs().maxCoeff(), (om - o).cwiseAbs().maxCoeff()});
      }
    }
    out << " graphs=" << graphs.size() << " max error=" << worst;
    return worst < 1e-9;
  });

  run(6, "bow class merges", [](std::ostringstream& out) {
    const auto& c = census();
    auto cluster = [&](const MixedGraph& h) { return c.cluster[static_cast<std::size_t>(c.index_of(encode(h)))]; };
    auto cls = [&](const MixedGraph& h) { return table().class_of(encode(h)); };
    const bool ab = cluster(bow_merge_a()) != cluster(bow_merge_b()) && cls(bow_merge_a()) == cls(bow_merge_b());
    const bool cde = cluster(bow_merge_c()) != cluster(bow_merge_d()) && cluster(bow_merge_d()) != cluster(bow_merge_e()) &&
                     cluster(bow_merge_c()) != cluster(bow_merge_e()) && cls(bow_merge_c()) == cls(bow_merge_d()) && cls(bow_merge_d()) == cls(bow_merge_e());
    // every multi-cluster class must be a relabeling of one of the two drawn classes
    auto cluster_key = [&](int k) {
      GraphCode best = ~GraphCode{0};
      for (int i : c.clusters[static_cast<std::size_t>(k)]) best = std::min(best, canonical_code(decode(c.codes[static_cast<std::size_t>(i)], 4)));
      return best;
    };
    auto keys_of = [&](int class_id) {
      std::multiset<GraphCode> keys;
      for (int k : table().classes[static_cast<std::size_t>(class_id)].clusters) keys.insert(cluster_key(k));
      return keys;
    };
    const auto ab_keys = keys_of(cls(bow_merge_a()));
    const auto cde_keys = keys_of(cls(bow_merge_c()));
    int merged = 0, other = 0;
    for (const auto& e : table().classes) {
      if (e.clusters.size() < 2) continue;
      ++merged;
      const auto k = keys_of(e.id);
      if (k != ab_keys && k != cde_keys) ++other;
    }
    out << " (a)+(b)=" << ab << " (c)+(d)+(e)=" << cde << " merged classes=" << merged << " unexplained=" << other;
    return ab && cde && other == 0 && ab_keys.size() == 2 && cde_keys.size() == 3;
  });

  run(7, "inequality constraint", [](std::ostringstream& out) {
    Eigen::MatrixXd counter = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 1; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) counter(i, j) = counter(j, i) = 0.5;
    }
    const double prod = prop2_product(counter);
    auto rng = make_rng(kSeed, 7);
    int held = 0;
    for (int t = 0; t < 1000; ++t) held += prop2_holds(random_params(inconclusive_a(), rng).covariance());
    out << " counterexample product=" << prod << " holds=" << prop2_holds(counter) << " in-model holds=" << held << "/1000";
    return !prop2_holds(counter) && std::abs(prod - 0.125) < 1e-12 && held == 1000;
  });

  run(8, "class spot checks", [](std::ostringstream& out) {
    const auto& t = table();
    const auto& empty = t.classes[static_cast<std::size_t>(t.class_of(encode(MixedGraph(4))))];
    int covs = 0;
    for (const auto& tag : empty.constraints.tags) covs += tag.kind == ConstraintTag::Kind::VanishingCovariance;
    const bool e_ok = empty.constraints.polys.size() == 6 && covs == 6 && empty.dimension == 0;

    const auto star = parse_graph_text("nodes: a b c d\na -> b\na -> c\na -> d\n");
    const auto& sc = t.classes[static_cast<std::size_t>(t.class_of(encode(star)))];
    std::set<std::string> tags;
    for (const auto& tag : sc.constraints.tags) tags.insert(tag.to_string(star.names()));
    std::vector<Polynomial> star_expect{vanishing_pcorr_poly(1, 2, 0b0001), vanishing_pcorr_poly(1, 3, 0b0001),
                                        vanishing_pcorr_poly(2, 3, 0b0001)};
    std::sort(star_expect.begin(), star_expect.end(), polynomial_less);
    const bool s_ok = sc.constraints.polys == star_expect && sc.dimension == 3 &&
                      tags == std::set<std::string>{"pcorr(b,c|a)", "pcorr(b,d|a)", "pcorr(c,d|a)"};

    const auto& fc = t.classes[static_cast<std::size_t>(t.class_of(encode(bow_merge_a())))];
    std::vector<Polynomial> f_expect{canonicalize(s("cd")), canonicalize(s("ac") * s("bd") - s("ad") * s("bc"))};
    std::sort(f_expect.begin(), f_expect.end(), polynomial_less);
    const bool f_ok = fc.constraints.polys == f_expect && fc.dimension == 4;
    out << " empty=" << e_ok << " (dim " << empty.dimension << ") a-star=" << s_ok << " (dim " << sc.dimension
        << ") bow class=" << f_ok << " (dim " << fc.dimension << ")";
    return e_ok && s_ok && f_ok;
  });

  run(9, "fitting", [](std::ostringstream& out) {
    auto rng = make_rng(kSeed, 9);
    const auto all = enumerate_acyclic(4);
    // DAGs: one sweep, closed form
    int dags = 0, dag_bad = 0;
    double dag_gap = 0;
    while (dags < 50) {
      const auto g = decode(all[rng() % all.size()], 4);
      if (!g.bidirected().empty()) continue;
      ++dags;
      const auto d = simulate_cov(g, 1000, rng);
      const auto f = ricf_fit(g, d);
      const double gap = std::abs(f.loglik - dag_closed_form(g, d));
      dag_gap = std::max(dag_gap, gap);
      if (!f.converged || f.iterations != 1 || gap >= 1e-10) ++dag_bad;
    }
    // ascent on general graphs
    int fitted = 0, violations = 0;
    for (int t = 0; t < 100; ++t) {
      const auto g = decode(all[rng() % all.size()], 4);
      const auto d = simulate_cov(g, 1000, rng);
      try {
        const auto f = ricf_fit(g, d);
        ++fitted;
        violations += f.ascent_violations;
      } catch (const NotConverged& e) {
        violations += e.best.ascent_violations;
      }
    }
    // class members agree
    std::vector<int> multi;
    for (const auto& e : table().classes) {
      if (e.members.size() >= 2) multi.push_back(e.id);
    }
    std::shuffle(multi.begin(), multi.end(), rng);
    multi.resize(10);
    FitOptions o;
    o.tol = 1e-12;
    o.max_iter = 5000;
    o.starts = 3;
    double spread = 0;
    int compared = 0;
    for (int id : multi) {
      const auto& e = table().classes[static_cast<std::size_t>(id)];
      for (int r = 0; r < 20; ++r) {
        const auto gen = decode(e.members[rng() % e.members.size()], 4);
        const auto d = simulate_cov(gen, 2000, rng);
        std::vector<double> lls;
        for (std::size_t k = 0; k < e.members.size() && lls.size() < 4; k += 1 + e.members.size() / 4) {
          try {
            lls.push_back(ricf_fit(decode(e.members[k], 4), d, o).loglik);
          } catch (const NotConverged&) {
          }
        }
        if (lls.size() < 2) continue;
        ++compared;
        const auto [lo, hi] = std::minmax_element(lls.begin(), lls.end());
        spread = std::max(spread, *hi - *lo);
      }
    }
    out << " dags=" << dags << " bad=" << dag_bad << " max gap=" << dag_gap << "; fitted=" << fitted
        << "/100 ascent violations=" << violations << "; member comparisons=" << compared
        << " max loglik spread=" << spread;
    return dag_bad == 0 && violations == 0 && compared >= 100 && spread < 1e-4;
  });

  run(10, "selection", [](std::ostringstream& out) {
    const auto& t = table();
    const auto plan = fit_plan(t);
    const MixedGraph empty(4);
    const auto y = y_structure();
    const auto sat = saturated_dag(4);
    bool ok = true;
    const char* names[] = {"empty", "y", "saturated"};
    int which = 0;
    for (const auto* g : {&empty, &y, &sat}) {
      int correct = 0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto rng = make_rng(kSeed + 10, seed);
        const auto rep = select_class(t, plan, simulate_cov(*g, 10000, rng), {});
        correct += rep.best_class == t.class_of(encode(*g));
      }
      out << " " << names[which++] << "=" << correct << "/20";
      ok = ok && correct >= 18;
    }
    ExperimentOptions o;
    o.p = 10;
    o.reps = 100;
    o.n_samples = 1000;
    o.seed = kSeed;
    o.modes = {FilterMode::None, FilterMode::Mag, FilterMode::Full};
    const auto rep = run_ystruct(build_class_table(4), o);
    std::map<std::pair<StructureTest, FilterMode>, ExperimentRow> rows;
    for (const auto& r : rep.rows) rows[{r.test, r.mode}] = r;
    for (auto test : {StructureTest::Y, StructureTest::Combined}) {
      const auto& full = rows[{test, FilterMode::Full}];
      out << "; " << to_string(test) << " precision none/mag/full=" << rows[{test, FilterMode::None}].precision << "/"
          << rows[{test, FilterMode::Mag}].precision << "/" << full.precision << " recall mag/full="
          << rows[{test, FilterMode::Mag}].filter_recall << "/" << full.filter_recall << " (battery TP "
          << full.battery_true_positives << ")";
      ok = ok && full.filter_recall >= 0.95;
    }
    const auto& cn = rows[{StructureTest::Combined, FilterMode::None}];
    const auto& cf = rows[{StructureTest::Combined, FilterMode::Full}];
    out << "; combined margin=" << cf.precision - cn.precision;
    return ok && cf.precision >= cn.precision;
  });

  run(11, "jacobian", [](std::ostringstream& out) {
    auto rng = make_rng(kSeed, 11);
    std::normal_distribution<double> nd;
    const auto all = enumerate_acyclic(4);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
      const auto g = decode(all[rng() % all.size()], 4);
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4, 4);
      for (const auto& d : g.directed()) l(d.tail, d.head) = nd(rng);
      Eigen::MatrixXd x(4, 4);
      for (int i = 0; i < 16; ++i) x(i) = nd(rng);
      const Eigen::MatrixXd sig = x * x.transpose() + Eigen::MatrixXd::Identity(4, 4);
      const auto j = jacobian_at<double>(g, l, sig);
      const auto spec = jacobian_spec(g);
      auto om = [&](const Eigen::MatrixXd& lam, int v, int w) {
        const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4) - lam;
        return (m.transpose() * sig * m)(v, w);
      };
      const double h = 1e-6;
      for (std::size_t c = 0; c < spec.cols.size(); ++c) {
        Eigen::MatrixXd lp = l, lm = l;
        lp(spec.cols[c].tail, spec.cols[c].head) += h;
        lm(spec.cols[c].tail, spec.cols[c].head) -= h;
        for (std::size_t r = 0; r < spec.rows.size(); ++r) {
          const auto [v, w] = spec.rows[r];
          const double fd = (om(lp, v, w) - om(lm, v, w)) / (2 * h);
          worst = std::max(worst, std::abs(fd - j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
        }
      }
    }
    long disagreements = 0;
    for (std::size_t i = 0; i < census().codes.size(); ++i) {
      const auto g = decode(census().codes[i], 4);
      for (std::uint64_t seed : {kSeed + 1, kSeed + 2, kSeed + 3}) {
        if (generic_rank(g, 3, seed).rank != census().rank[i]) ++disagreements;
      }
    }
    out << " max |J - fd|=" << worst << " rank disagreements=" << disagreements << " over " << census().codes.size()
        << " graphs x 3 seeds";
    return worst < 1e-6 && disagreements == 0;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
