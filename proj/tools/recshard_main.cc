// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

// recshard: training-performance simulator and embedding placement tool.
//
// Exit codes: 0 success, 1 configuration error, 2 infeasible placement,
// 3 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "recshard/error.h"
#include "recshard/format.h"
#include "recshard/json_io.h"
#include "recshard/parallel.h"
#include "recshard/placement.h"
#include "recshard/presets.h"
#include "recshard/scenario.h"
#include "recshard/sweep.h"

namespace recshard {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

int Simulate(const std::string& config, const std::string& out_csv) {
  const Scenario s = ScenarioFromJson(ReadJsonFile(config));
  const CostBreakdown b = EvaluateScenario(s);
  Json j = {{"scenario_id", s.id},
            {"platform", s.platform.name},
            {"strategy", StrategyLabel(s.strategy)}};
  j.update(CostBreakdownToJson(b));
  std::cout << DumpJson(j);
  if (!out_csv.empty()) {
    std::vector<std::string> row = {s.id};
    const auto values = CostCsvValues(b);
    row.insert(row.end(), values.begin(), values.end());
    WriteText(out_csv, CsvLine(CostCsvColumns()) + CsvLine(row));
  }
  return kExitOk;
}

int Sweep(const std::string& spec_path, const std::string& out_dir,
          const std::string& baseline) {
  const SweepSpec spec = SweepSpecFromJson(ReadJsonFile(spec_path));
  const SweepResult r = RunSweep(spec, ThreadsFromEnv());
  const std::filesystem::path dir = out_dir;
  WriteText(dir / "sweep.csv", SweepCsv(r));
  WriteText(dir / "sweep.dat", SweepGnuplot(r, spec.base.id));
  if (!baseline.empty()) {
    const Comparison c = Compare(r.rows, baseline);
    WriteText(dir / "comparison.md", ComparisonMarkdown(c));
    WriteText(dir / "comparison.csv", ComparisonCsv(c));
  }
  size_t failed = 0;
  for (const auto& row : r.rows) failed += row.breakdown ? 0 : 1;
  std::cout << r.rows.size() << " scenarios, " << failed
            << " without result, written to " << dir.string() << "\n";
  return kExitOk;
}

int Shard(const std::string& tables_path, const std::string& devices_path,
          const std::string& strategy) {
  const auto tables = TableLoadsFromJson(ReadJsonFile(tables_path));
  const auto devices = ShardDevicesFromJson(ReadJsonFile(devices_path));
  const ShardAssignment a = strategy == "exact"
                                ? ShardTablesExact(tables, devices)
                                : ShardTablesLpt(tables, devices);
  std::cout << DumpJson(AssignmentToJson(tables, devices, a, strategy));
  std::cout << "makespan " << FormatDouble(a.makespan) << "\n";
  return kExitOk;
}

int Calibrate(const std::string& refs_path, const std::string& grid_path) {
  const auto refs = ReferencesFromJson(ReadJsonFile(refs_path));
  const CalibrationGrid grid = GridFromJson(ReadJsonFile(grid_path));
  const CalibrationResult r = Calibrate(refs, grid, ThreadsFromEnv());
  Json per_ref = Json::array();
  for (const auto& ref : refs) {
    per_ref.push_back({{"name", ref.name},
                       {"measured_ratio", ref.measured_ratio},
                       {"predicted_ratio", PredictedRatio(ref, r.coeffs)}});
  }
  std::cout << DumpJson({{"coefficients", CoefficientsToJson(r.coeffs)},
                         {"residual", r.residual},
                         {"grid_points", r.points},
                         {"references", per_ref}});
  return kExitOk;
}

int Reproduce(const std::string& figure, const std::string& out_dir) {
  for (const auto& path : ReproduceFigure(figure, out_dir, ThreadsFromEnv())) {
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

int PresetsList() {
  auto section = [](const char* title, const std::vector<std::string>& names) {
    std::cout << title << ":";
    for (const auto& n : names) std::cout << " " << n;
    std::cout << "\n";
  };
  section("platforms", PlatformPresetNames());
  section("models", ProductionPresetNames());
  section("figures", FigureNames());
  section("files", EmbeddedPresetFiles());
  return kExitOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"DLRM training-performance simulator and embedding placement"};
  app.require_subcommand(1);

  std::string config, out_csv;
  auto* simulate = app.add_subcommand("simulate", "Evaluate one scenario");
  simulate->add_option("--config", config, "Scenario JSON")->required();
  simulate->add_option("--out", out_csv, "Write a one-row CSV here");

  std::string spec, sweep_out, baseline;
  auto* sweep = app.add_subcommand("sweep", "Run a design-space sweep");
  sweep->add_option("--spec", spec, "Sweep JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--baseline", baseline,
                    "Also write ratios against this scenario id");

  std::string tables, devices, shard_strategy = "lpt";
  auto* shard = app.add_subcommand("shard", "Assign tables to devices");
  shard->add_option("--tables", tables, "Table list JSON")->required();
  shard->add_option("--devices", devices, "Device list JSON")->required();
  shard->add_option("--strategy", shard_strategy, "lpt or exact")
      ->check(CLI::IsMember({"lpt", "exact"}));

  std::string refs, grid;
  auto* calibrate = app.add_subcommand("calibrate", "Fit cost coefficients");
  calibrate->add_option("--refs", refs, "Reference JSON")->required();
  calibrate->add_option("--grid", grid, "Grid JSON")->required();

  std::string figure, fig_out;
  auto* reproduce = app.add_subcommand("reproduce", "Run a canned figure");
  reproduce->add_option("--figure", figure, "fig8, fig9, fig10, mlp, fig12")
      ->required();
  reproduce->add_option("--out", fig_out, "Output directory")->required();

  auto* presets = app.add_subcommand("presets", "Inspect built-in presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return Simulate(config, out_csv);
    if (*sweep) return Sweep(spec, sweep_out, baseline);
    if (*shard) return Shard(tables, devices, shard_strategy);
    if (*calibrate) return Calibrate(refs, grid);
    if (*reproduce) return Reproduce(figure, fig_out);
    if (*presets_list) return PresetsList();
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TooLargeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace
}  // namespace recshard

int main(int argc, char** argv) { return recshard::Run(argc, argv); }
