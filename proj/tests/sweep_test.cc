// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "recshard/error.h"
#include "recshard/format.h"
#include "recshard/presets.h"
#include "recshard/sweep.h"

namespace recshard {
namespace {

SweepSpec SmallSpec() {
  SweepSpec spec;
  spec.base = TestSuiteCpu();
  spec.axes = {{SweepParam::kBatchSize, {int64_t{100}, int64_t{200}, int64_t{400}}},
               {SweepParam::kStrategy,
                {HostMemoryPlacement{}, RemotePsPlacement{2}}}};
  return spec;
}

TEST(RunSweep, CartesianProductLastAxisFastest) {
  const SweepResult r = RunSweep(SmallSpec(), 1);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.axis_names, (std::vector<std::string>{"batch_size", "strategy"}));
  EXPECT_EQ(r.rows[0].id, "s0000");
  EXPECT_EQ(r.rows[5].id, "s0005");
  EXPECT_EQ(r.rows[1].axis_labels,
            (std::vector<std::string>{"100", "remote_ps/2"}));
  EXPECT_EQ(r.rows[4].axis_labels,
            (std::vector<std::string>{"400", "host_memory"}));
  EXPECT_EQ(*r.rows[0].rel_throughput, 1.0);
  EXPECT_EQ(*r.rows[0].rel_power_efficiency, 1.0);
}

TEST(RunSweep, RowsMatchDirectEvaluation) {
  const SweepSpec spec = SmallSpec();
  const SweepResult r = RunSweep(spec, 4);
  Scenario s = spec.base;
  s.model.batch_size = 400;
  s.strategy = RemotePsPlacement{2};
  EXPECT_EQ(r.rows[5].breakdown->throughput, EvaluateScenario(s).throughput);
}

TEST(RunSweep, SingleAxisSingleValue) {
  SweepSpec spec;
  spec.base = TestSuiteCpu();
  spec.axes = {{SweepParam::kBatchSize, {int64_t{200}}}};
  const SweepResult r = RunSweep(spec, 1);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].breakdown->throughput,
            EvaluateScenario(TestSuiteCpu()).throughput);
}

TEST(RunSweep, InfeasibleRowsCarryStatus) {
  SweepSpec spec;
  spec.base = TestSuiteBigBasin();
  spec.axes = {{SweepParam::kHashSize, {int64_t{100000}, int64_t{1} << 34}}};
  const SweepResult r = RunSweep(spec, 2);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.rows[0].breakdown.has_value());
  EXPECT_FALSE(r.rows[1].breakdown.has_value());
  EXPECT_FALSE(r.rows[1].rel_throughput.has_value());
  EXPECT_EQ(r.rows[1].error.rfind("infeasible: ", 0), 0u) << r.rows[1].error;
  const std::string csv = SweepCsv(r);
  EXPECT_NE(csv.find(",ok\n"), std::string::npos);
  EXPECT_NE(csv.find("infeasible: "), std::string::npos);
  const std::string dat = SweepGnuplot(r, "hash");
  EXPECT_NE(dat.find("1 17179869184 NaN NaN\n"), std::string::npos) << dat;
}

TEST(RunSweep, InfeasibleFirstRowLeavesRelativeColumnsEmpty) {
  SweepSpec spec;
  spec.base = TestSuiteBigBasin();
  spec.axes = {{SweepParam::kHashSize, {int64_t{1} << 34, int64_t{100000}}}};
  const SweepResult r = RunSweep(spec, 1);
  EXPECT_TRUE(r.rows[1].breakdown.has_value());
  EXPECT_FALSE(r.rows[1].rel_throughput.has_value());
}

TEST(RunSweep, BadAxisValueIsARowError) {
  SweepSpec spec;
  spec.base = TestSuiteCpu();
  spec.axes = {{SweepParam::kBatchSize, {int64_t{200}, int64_t{0}}}};
  const SweepResult r = RunSweep(spec, 1);
  EXPECT_TRUE(r.rows[0].breakdown.has_value());
  EXPECT_EQ(r.rows[1].error.rfind("error: ", 0), 0u) << r.rows[1].error;
}

TEST(RunSweep, CsvIdenticalAcrossThreadCounts) {
  for (const auto& name : {"fig9", "fig12"}) {
    for (const auto& named : FigureSweeps(name)) {
      const std::string one = SweepCsv(RunSweep(named.spec, 1));
      for (int threads : {2, 7, 32}) {
        EXPECT_EQ(SweepCsv(RunSweep(named.spec, threads)), one) << named.name;
      }
    }
  }
}

TEST(RunSweep, CsvHeaderAndWidth) {
  const std::string csv = SweepCsv(RunSweep(SmallSpec(), 1));
  EXPECT_EQ(csv.rfind("scenario_id,batch_size,strategy,", 0), 0u);
  size_t width = 0;
  size_t start = 0;
  while (start < csv.size()) {
    const size_t end = csv.find('\n', start);
    const std::string line = csv.substr(start, end - start);
    const size_t commas = std::count(line.begin(), line.end(), ',');
    if (start == 0) width = commas;
    EXPECT_EQ(commas, width) << line;
    start = end + 1;
  }
  EXPECT_EQ(width + 1, 3 + CostCsvColumns().size() - 1 + 3);
}

TEST(SweepSpec, ValidateRejectsEmptyAxes) {
  SweepSpec spec = SmallSpec();
  spec.axes.clear();
  EXPECT_THROW(spec.Validate(), ConfigError);
  spec = SmallSpec();
  spec.axes[1].values.clear();
  EXPECT_THROW(spec.Validate(), ConfigError);
}

TEST(Compare, AgainstItselfIsOne) {
  const SweepResult r = RunSweep(SmallSpec(), 1);
  const Comparison c = Compare(r.rows, "s0003");
  ASSERT_EQ(c.rows.size(), r.rows.size());
  EXPECT_EQ(*c.rows[3].throughput_ratio, 1.0);
  EXPECT_EQ(*c.rows[3].power_efficiency_ratio, 1.0);
  EXPECT_EQ(*c.rows[1].throughput_ratio,
            r.rows[1].breakdown->throughput / r.rows[3].breakdown->throughput);
  const std::string md = ComparisonMarkdown(c);
  EXPECT_EQ(md.rfind("Baseline: s0003\n", 0), 0u);
  EXPECT_NE(ComparisonCsv(c).find("s0003,s0003,1,1\n"), std::string::npos);
}

TEST(Compare, UnknownOrInfeasibleBaseline) {
  SweepSpec spec;
  spec.base = TestSuiteBigBasin();
  spec.axes = {{SweepParam::kHashSize, {int64_t{100000}, int64_t{1} << 34}}};
  const SweepResult r = RunSweep(spec, 1);
  EXPECT_THROW(Compare(r.rows, "nope"), ConfigError);
  EXPECT_THROW(Compare(r.rows, "s0001"), ConfigError);
  const Comparison c = Compare(r.rows, "s0000");
  EXPECT_FALSE(c.rows[1].throughput_ratio.has_value());
}

TEST(ApplyAxisValue, MlpRederivesInputDims) {
  Scenario s = TestSuiteCpu();
  ApplyAxisValue(s, SweepParam::kMlp, MlpShape{1024, 4});
  EXPECT_EQ(s.model.bottom_mlp.layer_widths, (std::vector<int64_t>(4, 1024)));
  EXPECT_EQ(s.model.bottom_mlp.input_dim, s.model.dense_count);
  EXPECT_EQ(s.model.top_mlp.num_layers(), 4u);
  EXPECT_NO_THROW(ValidateModel(s.model));
  EXPECT_NO_THROW(EvaluateScenario(s));
}

TEST(ApplyAxisValue, SparseCountCopiesTheFirstTable) {
  Scenario s = TestSuiteCpu();
  ApplyAxisValue(s, SweepParam::kSparseCount, int64_t{5});
  ASSERT_EQ(s.model.sparse.size(), 5u);
  for (const auto& t : s.model.sparse) EXPECT_EQ(t, s.model.sparse[0]);
  EXPECT_NO_THROW(EvaluateScenario(s));
}

TEST(ApplyAxisValue, TypeMismatchIsConfigError) {
  Scenario s = TestSuiteCpu();
  EXPECT_THROW(ApplyAxisValue(s, SweepParam::kBatchSize, MlpShape{}),
               ConfigError);
  EXPECT_THROW(ApplyAxisValue(s, SweepParam::kStrategy, int64_t{3}),
               ConfigError);
  EXPECT_THROW(ApplyAxisValue(s, SweepParam::kHashSize, int64_t{0}),
               ConfigError);
}

TEST(Parse, SweepParamNamesRoundTrip) {
  for (SweepParam p :
       {SweepParam::kBatchSize, SweepParam::kSparseCount,
        SweepParam::kDenseCount, SweepParam::kHashSize, SweepParam::kMlp,
        SweepParam::kStrategy, SweepParam::kNumTrainers,
        SweepParam::kPlatform}) {
    EXPECT_EQ(ParseSweepParam(SweepParamName(p)), p);
  }
  EXPECT_THROW(ParseSweepParam("batch"), ConfigError);
}

TEST(Parse, MlpShape) {
  EXPECT_EQ(ParseMlpShape("512^3"), (MlpShape{512, 3}));
  EXPECT_EQ(ParseMlpShape("1024^4"), (MlpShape{1024, 4}));
  for (const char* bad : {"512", "512^", "^3", "0^3", "512^0", "a^b", "512^3x"}) {
    EXPECT_THROW(ParseMlpShape(bad), ConfigError) << bad;
  }
  EXPECT_EQ(AxisValueLabel(MlpShape{256, 4}), "256^4");
}

TEST(FigureSweeps, KnownFigures) {
  for (const auto& name : FigureNames()) {
    const auto sweeps = FigureSweeps(name);
    EXPECT_FALSE(sweeps.empty()) << name;
    for (const auto& s : sweeps) EXPECT_NO_THROW(s.spec.Validate()) << s.name;
  }
  const auto fig8 = FigureSweeps("fig8");
  ASSERT_EQ(fig8.size(), 2u);
  EXPECT_EQ(fig8[0].name, "fig8_cpu");
  EXPECT_EQ(fig8[0].spec.axes[0].param, SweepParam::kDenseCount);
  EXPECT_EQ(fig8[0].spec.axes[1].param, SweepParam::kSparseCount);
  EXPECT_THROW(FigureSweeps("fig99"), ConfigError);
}

TEST(TestSuite, Baselines) {
  const Scenario cpu = TestSuiteCpu();
  const Scenario gpu = TestSuiteBigBasin();
  EXPECT_EQ(cpu.model.batch_size, 200);
  EXPECT_EQ(gpu.model.batch_size, 1600);
  EXPECT_EQ(cpu.model.dense_count, 512);
  EXPECT_EQ(cpu.model.sparse.size(), 32u);
  EXPECT_EQ(cpu.model.sparse[0].hash_size, 100000u);
  EXPECT_EQ(cpu.model.sparse[0].mean_pooling, 16);
  EXPECT_TRUE(std::holds_alternative<HostMemoryPlacement>(cpu.strategy));
  EXPECT_TRUE(std::holds_alternative<GpuMemoryPlacement>(gpu.strategy));
}

TEST(Format, DoubleRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exp(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::pow(10.0, exp(rng)) * (i % 2 ? -1 : 1);
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(1), "1");
  EXPECT_EQ(FormatDouble(NAN), "nan");
  EXPECT_EQ(FormatDouble(-INFINITY), "-inf");
  EXPECT_EQ(FormatOptional(std::nullopt), "");
}

TEST(Format, CsvQuoting) {
  EXPECT_EQ(CsvField("plain"), "plain");
  EXPECT_EQ(CsvField("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvField("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvField("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(CsvLine({"a", "b,c", ""}), "a,\"b,c\",\n");
}

}  // namespace
}  // namespace recshard
