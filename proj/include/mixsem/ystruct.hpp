#ifndef MIXSEM_YSTRUCT_HPP
#define MIXSEM_YSTRUCT_HPP

#include "mixsem/equivalence.hpp"
#include "mixsem/fit.hpp"
#include "mixsem/simulate.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <vector>

namespace mixsem {

/// Y: the full battery. Combined: Y or extended Y.
enum class StructureTest { Y, Combined };
enum class FilterMode { None, Mag, Full };

std::string to_string(StructureTest t);
std::string to_string(FilterMode m);
FilterMode parse_filter_mode(const std::string& s);

/// Tuple (a, b, c, d) with spine c -> d. Both tests require a, c / b, c /
/// c, d / a, d / b, d dependent, a _||_ b, b _||_ d | c and a, b dependent
/// given c. The Y test adds a _||_ d | c.
struct BatteryConfig {
  double alpha = 0.01;
  bool combined_requires_ab = true;    // marginal a _||_ b in the combined test
  bool combined_requires_ad_c = false; // a _||_ d | c in the combined test
};

bool run_battery(const SampleCov& data, const std::array<NodeId, 4>& t, StructureTest test,
                 const BatteryConfig& cfg);

/// Y: a -> c <- b, c -> d. Extended: b -> c -> d, a <-> c, a <-> d.
MixedGraph y_structure();
MixedGraph extended_y_structure();

struct YStructVerdict {
  std::array<NodeId, 4> tuple{};
  StructureTest test = StructureTest::Y;
  bool battery_pass = false;
  bool filter_pass_mag = false;
  bool filter_pass_full = false;
  bool truth = false;
  int selected_mag = -1;   // best class on the tuple labeling, -1 if none
  int selected_full = -1;
};

struct ExperimentRow {
  StructureTest test = StructureTest::Y;
  FilterMode mode = FilterMode::None;
  long passes = 0;
  long true_positives = 0;
  long false_positives = 0;
  long battery_true_positives = 0;  // true positives before filtering
  double precision = 0;              // TP / passes, 0 when nothing passed
  double filter_recall = 1;          // TP / battery TP, 1 when there were none
};

struct ExperimentOptions {
  int p = 10;
  int reps = 100;
  long n_samples = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::vector<FilterMode> modes{FilterMode::None, FilterMode::Full};
  BatteryConfig battery;
  GeneratorOptions generator;
  FitOptions fit;
  int jobs = 1;
  bool keep_verdicts = false;
};

struct ExperimentReport {
  int p = 0;
  int reps = 0;
  long n_samples = 0;
  double alpha = 0;
  std::uint64_t seed = 0;
  std::vector<ExperimentRow> rows;
  long tuple_failures = 0;  // selections that threw; the tuple is dropped by the filter
  long selections = 0;
  double runtime_seconds = 0;
  std::vector<YStructVerdict> verdicts;
};

/// Needs the 4-node class table. Deterministic in (table, options) for any
/// number of jobs.
ExperimentReport run_ystruct(const ClassTable& table, const ExperimentOptions& opts);

nlohmann::json experiment_report_to_json(const ExperimentReport& r);
std::string experiment_report_to_csv(const ExperimentReport& r);

}  // namespace mixsem

#endif  // MIXSEM_YSTRUCT_HPP
