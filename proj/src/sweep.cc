// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/sweep.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "recshard/error.h"
#include "recshard/format.h"
#include "recshard/parallel.h"

namespace recshard {
namespace {

constexpr std::array<std::string_view, 8> kParamNames = {
    "batch_size", "sparse_count", "dense_count",  "hash_size",
    "mlp",        "strategy",     "num_trainers", "platform",
};

int64_t IntValue(SweepParam param, const AxisValue& value) {
  if (const auto* v = std::get_if<int64_t>(&value)) return *v;
  throw ConfigError(std::string(SweepParamName(param)) +
                    " axis needs integer values");
}

std::string ScenarioId(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%04zu", index);
  return buf;
}

std::string NoSpaces(std::string s) {
  for (char& c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<AxisValue> Doubling(int64_t first, int count) {
  std::vector<AxisValue> out;
  for (int i = 0; i < count; ++i) out.emplace_back(first << i);
  return out;
}

std::vector<NamedSweep> TestSuitePair(const std::string& figure,
                                      const std::vector<SweepAxis>& axes) {
  return {{figure + "_cpu", {TestSuiteCpu(), axes, 0}},
          {figure + "_bigbasin", {TestSuiteBigBasin(), axes, 0}}};
}

}  // namespace

std::string_view SweepParamName(SweepParam param) {
  return kParamNames[static_cast<size_t>(param)];
}

SweepParam ParseSweepParam(std::string_view name) {
  for (size_t i = 0; i < kParamNames.size(); ++i) {
    if (kParamNames[i] == name) return static_cast<SweepParam>(i);
  }
  throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
}

MlpShape ParseMlpShape(std::string_view text) {
  const size_t caret = text.find('^');
  MlpShape shape;
  auto parse = [&](std::string_view part, auto& out) {
    const auto res =
        std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc() && res.ptr == part.data() + part.size();
  };
  if (caret == std::string_view::npos ||
      !parse(text.substr(0, caret), shape.width) ||
      !parse(text.substr(caret + 1), shape.layers) || shape.width < 1 ||
      shape.layers < 1) {
    throw ConfigError("mlp value must look like 512^3, got '" +
                      std::string(text) + "'");
  }
  return shape;
}

std::string AxisValueLabel(const AxisValue& value) {
  struct Visitor {
    std::string operator()(int64_t v) const { return std::to_string(v); }
    std::string operator()(const MlpShape& m) const {
      return std::to_string(m.width) + "^" + std::to_string(m.layers);
    }
    std::string operator()(const PlacementStrategy& s) const {
      return StrategyLabel(s);
    }
    std::string operator()(const PlatformSpec& p) const { return p.name; }
  };
  return std::visit(Visitor{}, value);
}

void ApplyAxisValue(Scenario& s, SweepParam param, const AxisValue& value) {
  ModelConfig& m = s.model;
  switch (param) {
    case SweepParam::kBatchSize:
      m.batch_size = IntValue(param, value);
      return;
    case SweepParam::kSparseCount: {
      const int64_t n = IntValue(param, value);
      if (n < 0) throw ConfigError("sparse_count must be >= 0");
      if (static_cast<size_t>(n) > m.sparse.size() && m.sparse.empty()) {
        throw ConfigError("sparse_count axis needs a base table to copy");
      }
      m.sparse.resize(static_cast<size_t>(n),
                      m.sparse.empty() ? SparseFeatureSpec{} : m.sparse.back());
      RederiveInputDims(m);
      return;
    }
    case SweepParam::kDenseCount:
      m.dense_count = IntValue(param, value);
      RederiveInputDims(m);
      return;
    case SweepParam::kHashSize: {
      const int64_t rows = IntValue(param, value);
      if (rows < 1) throw ConfigError("hash_size must be >= 1");
      for (auto& spec : m.sparse) spec.hash_size = static_cast<uint64_t>(rows);
      return;
    }
    case SweepParam::kMlp: {
      const auto* shape = std::get_if<MlpShape>(&value);
      if (!shape) throw ConfigError("mlp axis needs width^layers values");
      const std::vector<int64_t> widths(shape->layers, shape->width);
      m.bottom_mlp.layer_widths = widths;
      m.top_mlp.layer_widths = widths;
      RederiveInputDims(m);
      return;
    }
    case SweepParam::kStrategy: {
      const auto* strategy = std::get_if<PlacementStrategy>(&value);
      if (!strategy) throw ConfigError("strategy axis needs strategies");
      s.strategy = *strategy;
      return;
    }
    case SweepParam::kNumTrainers: {
      if (!s.topology) {
        s.topology = ClusterTopology{};
        if (const auto* ps = std::get_if<RemotePsPlacement>(&s.strategy)) {
          s.topology->num_sparse_ps = ps->num_servers;
        }
      }
      s.topology->num_trainers = static_cast<int>(IntValue(param, value));
      return;
    }
    case SweepParam::kPlatform: {
      const auto* platform = std::get_if<PlatformSpec>(&value);
      if (!platform) throw ConfigError("platform axis needs platforms");
      s.platform = *platform;
      return;
    }
  }
}

void SweepSpec::Validate() const {
  if (axes.empty()) throw ConfigError("sweep needs at least one axis");
  for (const auto& a : axes) {
    if (a.values.empty()) {
      throw ConfigError("sweep axis " + std::string(SweepParamName(a.param)) +
                        " has no values");
    }
  }
}

SweepResult RunSweep(const SweepSpec& spec, int threads) {
  spec.Validate();
  SweepResult result;
  size_t total = 1;
  for (const auto& a : spec.axes) {
    result.axis_names.emplace_back(SweepParamName(a.param));
    total *= a.values.size();
  }

  std::vector<Scenario> scenarios(total);
  result.rows.resize(total);
  for (size_t i = 0; i < total; ++i) {
    // Mixed-radix decode, last axis fastest.
    std::vector<size_t> pick(spec.axes.size());
    size_t rest = i;
    for (size_t a = spec.axes.size(); a-- > 0;) {
      pick[a] = rest % spec.axes[a].values.size();
      rest /= spec.axes[a].values.size();
    }
    ScenarioResult& row = result.rows[i];
    row.index = i;
    row.id = ScenarioId(i);
    scenarios[i] = spec.base;
    scenarios[i].id = row.id;
    try {
      for (size_t a = 0; a < spec.axes.size(); ++a) {
        const AxisValue& v = spec.axes[a].values[pick[a]];
        row.axis_labels.push_back(AxisValueLabel(v));
        ApplyAxisValue(scenarios[i], spec.axes[a].param, v);
      }
    } catch (const Error& e) {
      row.error = std::string("error: ") + e.what();
    }
  }

  ParallelFor(
      total,
      [&](size_t i) {
        ScenarioResult& row = result.rows[i];
        if (!row.error.empty()) return;
        try {
          row.breakdown = EvaluateScenario(scenarios[i]);
        } catch (const InfeasibleError& e) {
          row.error = std::string("infeasible: ") + e.what();
        } catch (const Error& e) {
          row.error = std::string("error: ") + e.what();
        }
      },
      threads);

  const auto& first = result.rows.front().breakdown;
  for (auto& row : result.rows) {
    if (!first || !row.breakdown) continue;
    row.rel_throughput = row.breakdown->throughput / first->throughput;
    if (first->power_efficiency && row.breakdown->power_efficiency) {
      row.rel_power_efficiency =
          *row.breakdown->power_efficiency / *first->power_efficiency;
    }
  }
  return result;
}

std::string SweepCsv(const SweepResult& result) {
  std::vector<std::string> header = {"scenario_id"};
  header.insert(header.end(), result.axis_names.begin(),
                result.axis_names.end());
  const auto cost = CostCsvColumns();
  header.insert(header.end(), cost.begin() + 1, cost.end());
  for (const char* c : {"rel_throughput", "rel_power_eff", "status"}) {
    header.emplace_back(c);
  }
  std::string out = CsvLine(header);
  for (const auto& row : result.rows) {
    std::vector<std::string> fields = {row.id};
    fields.insert(fields.end(), row.axis_labels.begin(),
                  row.axis_labels.end());
    fields.resize(1 + result.axis_names.size());
    if (row.breakdown) {
      const auto values = CostCsvValues(*row.breakdown);
      fields.insert(fields.end(), values.begin(), values.end());
    } else {
      fields.resize(fields.size() + cost.size() - 1);
    }
    fields.push_back(FormatOptional(row.rel_throughput));
    fields.push_back(FormatOptional(row.rel_power_efficiency));
    fields.push_back(row.error.empty() ? "ok" : row.error);
    out += CsvLine(fields);
  }
  return out;
}

std::string SweepGnuplot(const SweepResult& result, std::string_view title) {
  std::string out = "# " + std::string(title) + "\n# index";
  for (const auto& name : result.axis_names) out += " " + name;
  out += " throughput rel_throughput\n";
  for (const auto& row : result.rows) {
    out += std::to_string(row.index);
    for (size_t a = 0; a < result.axis_names.size(); ++a) {
      out += " ";
      out += a < row.axis_labels.size() ? NoSpaces(row.axis_labels[a]) : "?";
    }
    out += " ";
    out += row.breakdown ? FormatDouble(row.breakdown->throughput) : "NaN";
    out += " ";
    out += row.rel_throughput ? FormatDouble(*row.rel_throughput) : "NaN";
    out += "\n";
  }
  return out;
}

Comparison Compare(const std::vector<ScenarioResult>& results,
                   std::string_view baseline_id) {
  const auto base = std::find_if(
      results.begin(), results.end(),
      [&](const ScenarioResult& r) { return r.id == baseline_id; });
  if (base == results.end()) {
    throw ConfigError("unknown baseline '" + std::string(baseline_id) + "'");
  }
  if (!base->breakdown) {
    throw ConfigError("baseline '" + std::string(baseline_id) +
                      "' has no result: " + base->error);
  }
  Comparison c;
  c.baseline_id = std::string(baseline_id);
  for (const auto& r : results) {
    ComparisonRow row;
    row.id = r.id;
    if (r.breakdown) {
      row.throughput_ratio = r.breakdown->throughput / base->breakdown->throughput;
      if (r.breakdown->power_efficiency && base->breakdown->power_efficiency) {
        row.power_efficiency_ratio = *r.breakdown->power_efficiency /
                                     *base->breakdown->power_efficiency;
      }
    }
    c.rows.push_back(std::move(row));
  }
  return c;
}

std::string ComparisonMarkdown(const Comparison& c) {
  auto cell = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string("n/a");
  };
  std::string out = "Baseline: " + c.baseline_id + "\n\n";
  out += "| scenario | throughput ratio | power efficiency ratio |\n";
  out += "|---|---:|---:|\n";
  for (const auto& r : c.rows) {
    out += "| " + r.id + " | " + cell(r.throughput_ratio) + " | " +
           cell(r.power_efficiency_ratio) + " |\n";
  }
  return out;
}

std::string ComparisonCsv(const Comparison& c) {
  std::string out = CsvLine(
      {"scenario_id", "baseline_id", "throughput_ratio", "power_eff_ratio"});
  for (const auto& r : c.rows) {
    out += CsvLine({r.id, c.baseline_id, FormatOptional(r.throughput_ratio),
                    FormatOptional(r.power_efficiency_ratio)});
  }
  return out;
}

ModelConfig TestSuiteModel(int64_t batch_size) {
  SparseFeatureSpec spec;
  spec.hash_size = 100000;
  spec.embedding_dim = 64;
  spec.mean_pooling = 16;
  spec.truncation = 32;
  return MakeModel(512, std::vector<SparseFeatureSpec>(32, spec),
                   {512, 512, 512}, {512, 512, 512},
                   Interaction{InteractionKind::kDotPairwise, 64}, batch_size);
}

Scenario TestSuiteCpu() {
  Scenario s;
  s.id = "test_suite_cpu";
  s.model = TestSuiteModel(200);
  s.platform = PlatformPreset("CPU");
  s.strategy = HostMemoryPlacement{};
  return s;
}

Scenario TestSuiteBigBasin() {
  Scenario s;
  s.id = "test_suite_bigbasin";
  s.model = TestSuiteModel(1600);
  s.platform = PlatformPreset("BigBasin32");
  s.strategy = GpuMemoryPlacement{Partition::kTableWise};
  return s;
}

std::vector<CaseStudy> CaseStudies(const CalibrationCoefficients& coeffs) {
  struct Setup {
    const char* model;
    int64_t gpu_batch;
    PlacementStrategy gpu_strategy;
    int trainers, dense_ps, sparse_ps, hogwild;
    double measured_ratio, measured_power;
  };
  const Setup setups[] = {
      {"M1", 1600, GpuMemoryPlacement{}, 6, 1, 7, 1, 2.25, 4.3},
      {"M2", 3200, GpuMemoryPlacement{}, 20, 2, 14, 1, 0.85, 2.8},
      {"M3", 800, RemotePsPlacement{16}, 8, 1, 7, 4, 0.67, 0.43},
  };
  constexpr int64_t kCpuBatch = 200;
  constexpr int kEasgdPeriod = 10;

  std::vector<CaseStudy> out;
  for (const auto& u : setups) {
    CaseStudy c;
    c.model = u.model;
    c.measured_throughput_ratio = u.measured_ratio;
    c.measured_power_ratio = u.measured_power;

    c.gpu.id = std::string(u.model) + "_bigbasin";
    c.gpu.model = ProductionPreset(u.model);
    c.gpu.model.batch_size = u.gpu_batch;
    c.gpu.platform = PlatformPreset("BigBasin32");
    c.gpu.strategy = u.gpu_strategy;
    c.gpu.coeffs = coeffs;

    c.cpu.id = std::string(u.model) + "_cpu_cluster";
    c.cpu.model = ProductionPreset(u.model);
    c.cpu.model.batch_size = kCpuBatch;
    c.cpu.platform = PlatformPreset("CPU");
    c.cpu.strategy = RemotePsPlacement{u.sparse_ps};
    ClusterTopology topo;
    topo.num_trainers = u.trainers;
    topo.num_dense_ps = u.dense_ps;
    topo.num_sparse_ps = u.sparse_ps;
    topo.sync = {SyncMethod::kEasgd, kEasgdPeriod, u.hogwild, 0.0};
    c.cpu.topology = topo;
    c.cpu.coeffs = coeffs;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> FigureNames() {
  return {"fig8", "fig9", "fig10", "mlp", "fig12"};
}

std::vector<NamedSweep> FigureSweeps(std::string_view figure) {
  if (figure == "fig8") {
    return TestSuitePair(
        "fig8", {{SweepParam::kDenseCount, Doubling(64, 7)},
                 {SweepParam::kSparseCount, Doubling(4, 6)}});
  }
  if (figure == "fig9") {
    return TestSuitePair("fig9", {{SweepParam::kBatchSize, Doubling(100, 8)}});
  }
  if (figure == "fig10") {
    return TestSuitePair("fig10",
                         {{SweepParam::kHashSize, Doubling(100000, 12)}});
  }
  if (figure == "mlp") {
    std::vector<AxisValue> shapes;
    for (int64_t w : {256, 512, 1024}) {
      for (int l : {3, 4}) shapes.emplace_back(MlpShape{w, l});
    }
    return TestSuitePair("mlp", {{SweepParam::kMlp, shapes}});
  }
  if (figure == "fig12") {
    Scenario base;
    base.id = "fig12";
    base.model = ProductionPreset("M2");
    base.model.batch_size = 3200;
    base.platform = PlatformPreset("BigBasin32");
    base.strategy = GpuMemoryPlacement{};
    SweepSpec spec{base,
                   {{SweepParam::kPlatform,
                     {PlatformPreset("BigBasin32"),
                      PlatformPreset("ZionPrototype")}},
                    {SweepParam::kStrategy,
                     {GpuMemoryPlacement{}, HostMemoryPlacement{},
                      RemotePsPlacement{8}}}},
                   0};
    return {{"fig12", spec}};
  }
  throw ConfigError("unknown figure '" + std::string(figure) + "'");
}

std::vector<std::filesystem::path> ReproduceFigure(
    std::string_view figure, const std::filesystem::path& out_dir,
    int threads) {
  const auto sweeps = FigureSweeps(figure);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& s : sweeps) {
    const SweepResult r = RunSweep(s.spec, threads);
    const auto csv = out_dir / (s.name + ".csv");
    const auto dat = out_dir / (s.name + ".dat");
    WriteFile(csv, SweepCsv(r));
    WriteFile(dat, SweepGnuplot(r, s.name));
    written.push_back(csv);
    written.push_back(dat);
  }
  return written;
}

}  // namespace recshard
