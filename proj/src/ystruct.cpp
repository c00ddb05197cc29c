#include "mixsem/ystruct.hpp"

#include "mixsem/parallel.hpp"
#include "mixsem/random.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>
#include <sstream>

namespace mixsem {

std::string to_string(StructureTest t) { return t == StructureTest::Y ? "y" : "combined"; }

std::string to_string(FilterMode m) {
  switch (m) {
    case FilterMode::None: return "none";
    case FilterMode::Mag: return "mag";
    case FilterMode::Full: return "full";
  }
  return "?";
}

FilterMode parse_filter_mode(const std::string& s) {
  if (s == "none") return FilterMode::None;
  if (s == "mag") return FilterMode::Mag;
  if (s == "full") return FilterMode::Full;
  throw std::invalid_argument("unknown filter mode '" + s + "'");
}

bool run_battery(const SampleCov& data, const std::array<NodeId, 4>& t, StructureTest test,
                 const BatteryConfig& cfg) {
  const auto [a, b, c, d] = t;
  auto indep = [&](NodeId x, NodeId y, std::vector<NodeId> cond) {
    const double r = partial_corr(data.S, x, y, cond);
    return fisher_z_test(r, data.N, static_cast<int>(cond.size()), cfg.alpha) == CiVerdict::Independent;
  };
  // cheapest rejections first
  if (indep(c, d, {}) || indep(a, c, {}) || indep(b, c, {})) return false;
  const bool y = test == StructureTest::Y;
  if ((y || cfg.combined_requires_ab) && !indep(a, b, {})) return false;
  if (indep(a, d, {}) || indep(b, d, {})) return false;
  if (!indep(b, d, {c})) return false;
  if ((y || cfg.combined_requires_ad_c) && !indep(a, d, {c})) return false;
  return !indep(a, b, {c});
}

MixedGraph y_structure() {
  MixedGraph g(4);
  g.add_directed(0, 2);
  g.add_directed(1, 2);
  g.add_directed(2, 3);
  return g;
}

MixedGraph extended_y_structure() {
  MixedGraph g(4);
  g.add_directed(1, 2);
  g.add_directed(2, 3);
  g.add_bidirected(0, 2);
  g.add_bidirected(0, 3);
  return g;
}

namespace {

constexpr int kTests = 2;
constexpr int kModes = 3;

struct Counts {
  long passes[kTests][kModes] = {};
  long tp[kTests][kModes] = {};
  long failures = 0;
  long selections = 0;
  std::vector<YStructVerdict> verdicts;
};

struct Selected {
  bool ok = false;
  int full = -1;  // class ids on the sorted labeling
  int mag = -1;
};

}  // namespace

ExperimentReport run_ystruct(const ClassTable& table, const ExperimentOptions& opts) {
  if (table.n != 4) throw std::invalid_argument("run_ystruct needs the 4-node class table");
  if (opts.p < 4) throw std::invalid_argument("run_ystruct needs p >= 4");
  const auto start = std::chrono::steady_clock::now();

  const int y_class = table.class_of(encode(y_structure()));
  const int ext_class = table.class_of(encode(extended_y_structure()));
  if (y_class < 0 || ext_class < 0) throw InvariantViolation("Y-structure classes missing from table");

  bool want_mode[kModes] = {};
  for (auto m : opts.modes) want_mode[static_cast<int>(m)] = true;
  const bool need_select = want_mode[1] || want_mode[2];

  std::vector<char> mag(table.classes.size());
  std::vector<MixedGraph> sample_member;
  for (const auto& c : table.classes) {
    mag[static_cast<std::size_t>(c.id)] = is_mag_class(c);
    sample_member.push_back(decode(c.members.front(), 4));
  }
  const auto plan = need_select ? fit_plan(table) : std::vector<std::vector<MixedGraph>>{};
  SelectOptions sel_opts;
  sel_opts.fit = opts.fit;
  if (!want_mode[2]) sel_opts.include = [](const ClassEntry& c) { return is_mag_class(c); };

  auto target = [&](StructureTest t, int cls) {
    return cls == y_class || (t == StructureTest::Combined && cls == ext_class);
  };

  std::vector<Counts> per_rep(static_cast<std::size_t>(opts.reps));
  parallel_for(per_rep.size(), opts.jobs, [&](std::size_t r) {
    Counts& out = per_rep[r];
    auto rng = make_rng(opts.seed, r);
    const auto model = random_sem(opts.p, rng, opts.generator);
    const auto data = sample_cov_from_data(sample(model, opts.n_samples, rng), model.names);
    std::map<std::array<NodeId, 4>, Selected> cache;

    auto select = [&](const std::array<NodeId, 4>& sorted) -> const Selected& {
      auto it = cache.find(sorted);
      if (it != cache.end()) return it->second;
      Selected s;
      try {
        auto so = sel_opts;
        so.fit.seed = make_rng(opts.seed ^ 0x9e3779b97f4a7c15ULL, r)();
        const auto report = select_class(table, plan, data.subset({sorted.begin(), sorted.end()}), so);
        s.full = report.best_class;
        s.mag = best_among(report, [&](int id) { return mag[static_cast<std::size_t>(id)] != 0; });
        s.ok = true;
      } catch (const Error& e) {
        std::cerr << "ystruct: rep " << r << " selection failed: " << e.what() << "\n";
        ++out.failures;
      }
      ++out.selections;
      return cache.emplace(sorted, s).first->second;
    };
    // class id on the sorted labeling -> class id on the tuple labeling
    auto to_tuple = [&](int cls, const std::array<NodeId, 4>& sorted, const std::array<NodeId, 4>& t) {
      if (cls < 0) return -1;
      std::array<NodeId, 4> perm{};
      for (int k = 0; k < 4; ++k) {
        perm[static_cast<std::size_t>(k)] =
            static_cast<NodeId>(std::find(t.begin(), t.end(), sorted[static_cast<std::size_t>(k)]) - t.begin());
      }
      return table.class_of(encode(relabel(sample_member[static_cast<std::size_t>(cls)], perm)));
    };

    const int p = opts.p;
    for (NodeId a = 0; a < p; ++a) {
      for (NodeId b = 0; b < p; ++b) {
        for (NodeId c = 0; c < p; ++c) {
          for (NodeId d = 0; d < p; ++d) {
            if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
            const std::array<NodeId, 4> t{a, b, c, d};
            bool pass[kTests];
            for (int k = 0; k < kTests; ++k) {
              pass[k] = run_battery(data, t, static_cast<StructureTest>(k), opts.battery);
            }
            if (!pass[0] && !pass[1]) continue;
            const int true_cls = table.class_of(encode(latent_projection(model, t)));
            int full_cls = -1, mag_cls = -1;
            bool sel_ok = false;
            if (need_select) {
              auto sorted = t;
              std::sort(sorted.begin(), sorted.end());
              const auto& s = select(sorted);
              sel_ok = s.ok;
              if (s.ok) {
                full_cls = to_tuple(s.full, sorted, t);
                mag_cls = to_tuple(s.mag, sorted, t);
              }
            }
            for (int k = 0; k < kTests; ++k) {
              if (!pass[k]) continue;
              const auto test = static_cast<StructureTest>(k);
              const bool truth = target(test, true_cls);
              const bool keep[kModes] = {true, sel_ok && target(test, mag_cls), sel_ok && target(test, full_cls)};
              for (int m = 0; m < kModes; ++m) {
                if (!keep[m]) continue;
                ++out.passes[k][m];
                if (truth) ++out.tp[k][m];
              }
              if (opts.keep_verdicts) {
                out.verdicts.push_back({t, test, true, keep[1], keep[2], truth, mag_cls, full_cls});
              }
            }
          }
        }
      }
    }
  });

  ExperimentReport rep;
  rep.p = opts.p;
  rep.reps = opts.reps;
  rep.n_samples = opts.n_samples;
  rep.alpha = opts.battery.alpha;
  rep.seed = opts.seed;
  long passes[kTests][kModes] = {};
  long tp[kTests][kModes] = {};
  for (auto& c : per_rep) {
    for (int k = 0; k < kTests; ++k) {
      for (int m = 0; m < kModes; ++m) {
        passes[k][m] += c.passes[k][m];
        tp[k][m] += c.tp[k][m];
      }
    }
    rep.tuple_failures += c.failures;
    rep.selections += c.selections;
    if (opts.keep_verdicts) rep.verdicts.insert(rep.verdicts.end(), c.verdicts.begin(), c.verdicts.end());
  }
  for (int k = 0; k < kTests; ++k) {
    for (int m = 0; m < kModes; ++m) {
      if (!want_mode[m]) continue;
      ExperimentRow row;
      row.test = static_cast<StructureTest>(k);
      row.mode = static_cast<FilterMode>(m);
      row.passes = passes[k][m];
      row.true_positives = tp[k][m];
      row.false_positives = row.passes - row.true_positives;
      row.battery_true_positives = tp[k][0];
      row.precision = row.passes > 0 ? static_cast<double>(row.true_positives) / static_cast<double>(row.passes) : 0.0;
      row.filter_recall = row.battery_true_positives > 0 ? static_cast<double>(row.true_positives) /
                                                               static_cast<double>(row.battery_true_positives)
                                                         : 1.0;
      rep.rows.push_back(row);
    }
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

nlohmann::json experiment_report_to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["p"] = r.p;
  j["reps"] = r.reps;
  j["n"] = r.n_samples;
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["selections"] = r.selections;
  j["tuple_failures"] = r.tuple_failures;
  j["runtime_seconds"] = r.runtime_seconds;
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"test", to_string(row.test)},
                    {"filter", to_string(row.mode)},
                    {"passes", row.passes},
                    {"true_positives", row.true_positives},
                    {"false_positives", row.false_positives},
                    {"battery_true_positives", row.battery_true_positives},
                    {"precision", row.precision},
                    {"filter_recall", row.filter_recall}});
  }
  j["rows"] = rows;
  return j;
}

std::string experiment_report_to_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "p,test,filter,passes,true_positives,false_positives,battery_true_positives,precision,filter_recall\n";
  for (const auto& row : r.rows) {
    out << r.p << ',' << to_string(row.test) << ',' << to_string(row.mode) << ',' << row.passes << ','
        << row.true_positives << ',' << row.false_positives << ',' << row.battery_true_positives << ','
        << row.precision << ',' << row.filter_recall << '\n';
  }
  return out.str();
}

}  // namespace mixsem
