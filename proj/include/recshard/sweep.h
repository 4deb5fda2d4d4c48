// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_SWEEP_H_
#define RECSHARD_SWEEP_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "recshard/scenario.h"

namespace recshard {

enum class SweepParam {
  kBatchSize,
  kSparseCount,
  kDenseCount,
  kHashSize,     // uniform hash size for every table
  kMlp,          // both stacks become `layers` layers of `width`
  kStrategy,
  kNumTrainers,
  kPlatform,
};

// "batch_size", "sparse_count", "dense_count", "hash_size", "mlp",
// "strategy", "num_trainers", "platform".
std::string_view SweepParamName(SweepParam param);
SweepParam ParseSweepParam(std::string_view name);

// width^layers, e.g. 512^3.
struct MlpShape {
  int64_t width = 512;
  int layers = 3;
  bool operator==(const MlpShape&) const = default;
};
MlpShape ParseMlpShape(std::string_view text);

using AxisValue = std::variant<int64_t, MlpShape, PlacementStrategy,
                               PlatformSpec>;

// Text used in ids and CSV: "1600", "512^3", "remote_ps/8", "BigBasin32".
std::string AxisValueLabel(const AxisValue& value);

// Sets one parameter on `scenario`, re-deriving MLP input dims. Throws
// ConfigError when the value type does not fit the parameter.
void ApplyAxisValue(Scenario& scenario, SweepParam param,
                    const AxisValue& value);

struct SweepAxis {
  SweepParam param = SweepParam::kBatchSize;
  std::vector<AxisValue> values;
};

struct SweepSpec {
  Scenario base;
  std::vector<SweepAxis> axes;
  uint64_t seed = 0;  // recorded; synthetic base models are drawn with it

  void Validate() const;
};

struct ScenarioResult {
  size_t index = 0;
  std::string id;
  std::vector<std::string> axis_labels;
  std::optional<CostBreakdown> breakdown;  // unset when infeasible
  std::string error;
  // Against the first scenario; unset if either side is missing.
  std::optional<double> rel_throughput;
  std::optional<double> rel_power_efficiency;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<ScenarioResult> rows;
};

// Evaluates the Cartesian product of the axes, first axis slowest.
// Infeasible or invalid scenarios become rows with an error instead of
// aborting.
SweepResult RunSweep(const SweepSpec& spec, int threads);

// scenario_id, axis columns, cost columns, rel_throughput, rel_power_eff,
// status.
std::string SweepCsv(const SweepResult& result);

// Whitespace-separated columns for gnuplot: index, axis labels, throughput,
// rel_throughput. Infeasible rows carry NaN.
std::string SweepGnuplot(const SweepResult& result, std::string_view title);

struct ComparisonRow {
  std::string id;
  std::optional<double> throughput_ratio;
  std::optional<double> power_efficiency_ratio;
};

struct Comparison {
  std::string baseline_id;
  std::vector<ComparisonRow> rows;
};

// Ratios of every row against `baseline_id`. Throws ConfigError when the
// baseline is unknown or infeasible.
Comparison Compare(const std::vector<ScenarioResult>& results,
                   std::string_view baseline_id);
std::string ComparisonMarkdown(const Comparison& comparison);
std::string ComparisonCsv(const Comparison& comparison);

// The synthetic test-suite model: 512 dense, 32 tables of 10^5 rows at
// pooling 16, 512^3 stacks, dot interaction.
ModelConfig TestSuiteModel(int64_t batch_size);

// Test-suite baselines: CPU at batch 200 with host-memory tables and
// BigBasin32 at batch 1600 with GPU-memory tables.
Scenario TestSuiteCpu();
Scenario TestSuiteBigBasin();

// One production model on its CPU cluster and on one BigBasin32 server.
struct CaseStudy {
  std::string model;
  Scenario gpu;
  Scenario cpu;
  double measured_throughput_ratio = 0;
  double measured_power_ratio = 0;
};
std::vector<CaseStudy> CaseStudies(const CalibrationCoefficients& coeffs);

// Named sweeps behind one figure, e.g. {"fig9_cpu", ...}.
struct NamedSweep {
  std::string name;
  SweepSpec spec;
};
std::vector<std::string> FigureNames();
std::vector<NamedSweep> FigureSweeps(std::string_view figure);

// Runs a figure's sweeps and writes <name>.csv and <name>.dat per sweep into
// `out_dir`. Returns the written paths.
std::vector<std::filesystem::path> ReproduceFigure(
    std::string_view figure, const std::filesystem::path& out_dir,
    int threads);

}  // namespace recshard

#endif  // RECSHARD_SWEEP_H_
