#include "mixsem/constraints.hpp"
#include "mixsem/equivalence.hpp"
#include "mixsem/fit.hpp"
#include "mixsem/graph_io.hpp"
#include "mixsem/htc.hpp"
#include "mixsem/random.hpp"
#include "mixsem/simulate.hpp"
#include "mixsem/ystruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace mixsem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

struct DataArgs {
  std::string data;
  std::string cov;
  long n = 0;

  void add(CLI::App* cmd) {
    auto* d = cmd->add_option("--data", data, "CSV of samples, header = node names");
    auto* c = cmd->add_option("--cov", cov, "covariance CSV");
    d->excludes(c);
    cmd->add_option("--n", n, "sample size for --cov");
  }

  SampleCov load() const {
    if (!data.empty()) return read_data_csv(data);
    if (cov.empty()) throw UsageError("one of --data or --cov is required");
    if (n <= 0) throw UsageError("--cov needs --n");
    return read_cov_csv(cov, n);
  }
};

void add_fit_options(CLI::App* cmd, FitOptions& o) {
  cmd->add_option("--tol", o.tol, "relative loglik change for convergence")->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "sweeps per attempt")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "random restarts after a failed attempt")->capture_default_str();
  cmd->add_option("--starts", o.starts, "converged attempts to collect")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for random initializations")->capture_default_str();
}

// put the data columns in graph order
SampleCov align(const SampleCov& data, const MixedGraph& g) {
  if (data.size() != g.size()) {
    throw DataError("dimension mismatch: graph has " + std::to_string(g.size()) + " nodes, data has " +
                    std::to_string(data.size()));
  }
  std::vector<NodeId> order;
  for (const auto& name : g.names()) {
    auto it = std::find(data.names.begin(), data.names.end(), name);
    if (it == data.names.end()) throw DataError("node '" + name + "' missing from data");
    order.push_back(static_cast<NodeId>(it - data.names.begin()));
  }
  return data.subset(order);
}

std::string set_text(const MixedGraph& g, std::uint32_t mask) {
  std::string s = "{";
  for (NodeId v : mask_to_nodes(mask)) s += (s.size() > 1 ? "," : "") + g.name(v);
  return s + "}";
}

void print_constraints(std::ostream& out, const MixedGraph& g, const ConstraintSet& cs) {
  for (std::size_t i = 0; i < cs.polys.size(); ++i) {
    out << "  " << cs.tags[i].to_string(g.names()) << ": " << to_string(cs.polys[i], g.names()) << "\n";
  }
}

int cmd_enumerate(int n, const std::string& out_path, int jobs, std::uint64_t seed, int trials) {
  if (n < 1 || n > 4) throw UsageError("--nodes must be between 1 and 4");
  if (trials < 1) throw UsageError("--rank-trials must be positive");
  (void)jobs;  // census is serial; output never depends on it
  const auto table = build_class_table(n, trials, seed);
  std::cout << "graphs=" << table.graph_count << " clusters=" << table.cluster_count
            << " classes=" << table.classes.size() << "\n";
  std::map<int, int> by_dim;
  for (const auto& c : table.classes) ++by_dim[c.dimension];
  for (const auto& [d, k] : by_dim) std::cout << "dimension " << d << ": " << k << " classes\n";
  if (!out_path.empty()) write_file(out_path, class_table_to_json(table).dump(1) + "\n");
  return kOk;
}

int cmd_analyze(const std::string& path, bool constraints_only) {
  const auto g = read_graph_file(path);
  if (!is_acyclic(g)) throw DataError(path + ": graph has a directed cycle");
  const auto htc = find_identifying_sets(g);
  if (constraints_only) {
    if (!htc.identifiable) {
      std::cout << "htc: inconclusive, no constraints derived\n";
      return kOk;
    }
    const auto cs = theorem1_constraints(g, htc.sets);
    std::cout << cs.polys.size() << " constraints\n";
    print_constraints(std::cout, g, cs);
    return kOk;
  }

  std::cout << format_graph_text(g);
  if (htc.identifiable) {
    std::cout << "htc: identifiable\n";
    for (NodeId v = 0; v < g.size(); ++v) {
      std::cout << "  Y_" << g.name(v) << " = " << set_text(g, htc.sets.sets[static_cast<std::size_t>(v)]) << "\n";
    }
    std::cout << "  order:";
    for (NodeId v : htc.sets.order) std::cout << " " << g.name(v);
    std::cout << "\n";
    const auto cs = theorem1_constraints(g, htc.sets);
    std::cout << "constraints: " << cs.polys.size() << "\n";
    print_constraints(std::cout, g, cs);
  } else {
    std::cout << "htc: inconclusive\n";
  }
  const auto rank = generic_rank(g);
  const int bidirected = static_cast<int>(g.bidirected().size());
  std::cout << "rank: " << rank.rank << "\n";
  std::cout << "deficiency: " << rank.deficiency << (rank.deficiency == 0 ? " (finite-to-one)" : " (infinite-to-one)")
            << "\n";
  std::cout << "dimension: " << rank.rank + bidirected << "\n";
  if (rank.deficiency > 0) {
    const auto eq = theorem2_equivalents(g);
    std::cout << "equivalents: " << eq.size() << "\n";
    for (const auto& h : eq) {
      std::cout << "  ";
      bool first = true;
      for (const auto& e : h.edges()) {
        std::cout << (first ? "" : ", ") << format_edge(h, e);
        first = false;
      }
      std::cout << "\n";
    }
  }
  return kOk;
}

int cmd_fit(const std::string& path, const DataArgs& in, const FitOptions& opts) {
  const auto g = read_graph_file(path);
  const auto data = align(in.load(), g);
  try {
    std::cout << fit_result_to_json(ricf_fit(g, data, opts), g).dump(2) << "\n";
  } catch (const NotConverged& e) {
    std::cout << fit_result_to_json(e.best, g).dump(2) << "\n";
    std::cerr << "mixsem: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

int cmd_select(const std::string& classes, const DataArgs& in, SelectOptions opts) {
  const auto table = class_table_from_json(read_json_file(classes));
  const auto data = in.load();
  if (data.size() != table.n) {
    throw DataError("dimension mismatch: class table has " + std::to_string(table.n) + " nodes, data has " +
                    std::to_string(data.size()));
  }
  std::cout << score_report_to_json(select_class(table, data, opts)).dump(2) << "\n";
  return kOk;
}

int cmd_simulate(int p, long n, std::uint64_t seed, const std::string& prefix, const GeneratorOptions& gen) {
  if (p < 4) throw UsageError("--p must be at least 4");
  if (n < 1) throw UsageError("--n must be positive");
  auto rng = make_rng(seed);
  const auto m = random_sem(p, rng, gen);
  const auto x = sample(m, n, rng);
  write_file(prefix + "_graph.json", sem_graph_to_json(m).dump(2) + "\n");
  write_file(prefix + "_params.json", sem_params_to_json(m).dump(2) + "\n");
  write_data_csv(prefix + "_data.csv", m.names, x);
  std::cout << "directed=" << m.directed.size() << " bidirected=" << m.bidirected.size() << " samples=" << n << "\n";
  return kOk;
}

int cmd_ystruct(ExperimentOptions opts, const std::string& filter, const std::string& classes,
                const std::string& csv_path) {
  if (opts.p < 4) throw UsageError("--p must be at least 4");
  if (opts.reps < 1 || opts.n_samples < 6) throw UsageError("--reps must be positive and --n at least 6");
  const auto mode = parse_filter_mode(filter);
  opts.modes = {FilterMode::None};
  if (mode != FilterMode::None) opts.modes.push_back(mode);
  ClassTable table;
  if (!classes.empty()) {
    table = class_table_from_json(read_json_file(classes));
  } else if (mode == FilterMode::None) {
    table = build_class_table(4);
  } else {
    throw UsageError("--classes is required for --filter " + filter);
  }
  const auto report = run_ystruct(table, opts);
  std::cout << experiment_report_to_json(report).dump(2) << "\n";
  if (!csv_path.empty()) write_file(csv_path, experiment_report_to_csv(report));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixsem: linear SEMs on acyclic mixed graphs"};
  app.require_subcommand(1);

  int nodes = 4, jobs = 1, trials = 3;
  std::uint64_t seed = kDefaultSeed;
  std::string out, file, classes, filter = "full", csv;
  DataArgs data;
  FitOptions fit_opts;
  SelectOptions sel_opts;
  GeneratorOptions gen;
  ExperimentOptions ys;
  int sim_p = 10;
  long sim_n = 1000;

  auto* en = app.add_subcommand("enumerate", "build the class table");
  en->add_option("--nodes", nodes, "node count (1..4)")->capture_default_str();
  en->add_option("--out", out, "class table JSON");
  en->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  en->add_option("--seed", seed, "rank seed")->capture_default_str();
  en->add_option("--rank-trials", trials, "random points per rank evaluation")->capture_default_str();

  auto* an = app.add_subcommand("analyze", "identification, constraints and rank of one graph");
  an->add_option("graph", file, "graph file")->required();

  auto* co = app.add_subcommand("constraints", "equality constraints of one graph");
  co->add_option("graph", file, "graph file")->required();

  auto* fi = app.add_subcommand("fit", "maximum likelihood fit of one graph");
  fi->add_option("graph", file, "graph file")->required();
  data.add(fi);
  add_fit_options(fi, fit_opts);

  auto* se = app.add_subcommand("select", "score every class by BIC");
  se->add_option("--classes", classes, "class table JSON")->required();
  data.add(se);
  add_fit_options(se, sel_opts.fit);
  se->add_option("--jobs", sel_opts.jobs, "worker threads")->capture_default_str();
  se->add_option("--tie-tol", sel_opts.tie_tol, "BIC tie tolerance")->capture_default_str();

  auto* si = app.add_subcommand("simulate", "random mixed-graph SEM and samples");
  si->add_option("--p", sim_p, "variables")->capture_default_str();
  si->add_option("--n", sim_n, "samples")->capture_default_str();
  si->add_option("--seed", seed, "generator seed")->capture_default_str();
  si->add_option("--out", out, "output prefix")->required();
  si->add_option("--p-directed", gen.p_directed, "directed edge density")->capture_default_str();
  si->add_option("--p-bidirected", gen.p_bidirected, "bidirected edge density")->capture_default_str();

  auto* yc = app.add_subcommand("ystruct", "Y-structure detection with class filtering");
  yc->add_option("--p", ys.p, "variables")->capture_default_str();
  yc->add_option("--reps", ys.reps, "replicates")->capture_default_str();
  yc->add_option("--n", ys.n_samples, "samples per replicate")->capture_default_str();
  yc->add_option("--alpha", ys.battery.alpha, "test level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  yc->add_option("--seed", ys.seed, "experiment seed")->capture_default_str();
  yc->add_option("--filter", filter, "none, mag or full")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "mag", "full"}));
  yc->add_option("--classes", classes, "4-node class table JSON");
  yc->add_option("--jobs", ys.jobs, "worker threads")->capture_default_str();
  yc->add_option("--csv", csv, "also write the table as CSV");
  yc->add_option("--p-directed", ys.generator.p_directed, "directed edge density")->capture_default_str();
  yc->add_option("--p-bidirected", ys.generator.p_bidirected, "bidirected edge density")->capture_default_str();
  yc->add_option("--combined-requires-ab", ys.battery.combined_requires_ab, "combined test keeps a _||_ b")
      ->capture_default_str();
  yc->add_option("--combined-requires-ad-c", ys.battery.combined_requires_ad_c, "combined test keeps a _||_ d | c")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*en) return cmd_enumerate(nodes, out, jobs, seed, trials);
    if (*an) return cmd_analyze(file, false);
    if (*co) return cmd_analyze(file, true);
    if (*fi) return cmd_fit(file, data, fit_opts);
    if (*se) return cmd_select(classes, data, sel_opts);
    if (*si) return cmd_simulate(sim_p, sim_n, seed, out, gen);
    if (*yc) return cmd_ystruct(ys, filter, classes, csv);
  } catch (const UsageError& e) {
    std::cerr << "mixsem: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "mixsem: " << e.what() << "\n";
    return kData;
  } catch (const CyclicUnsupported& e) {
    std::cerr << "mixsem: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "mixsem: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
