// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "recshard/error.h"
#include "recshard/placement.h"
#include "recshard/presets.h"

namespace recshard {
namespace {

constexpr uint64_t kHuge = uint64_t{1} << 50;
constexpr uint64_t kGiB = uint64_t{1} << 30;

std::vector<TableLoad> Loads(std::vector<double> loads, uint64_t size = 1) {
  std::vector<TableLoad> out;
  for (size_t i = 0; i < loads.size(); ++i) {
    out.push_back({static_cast<int64_t>(i), size, loads[i]});
  }
  return out;
}

std::vector<ShardDevice> Devices(size_t n, uint64_t capacity = kHuge) {
  std::vector<ShardDevice> out;
  for (size_t i = 0; i < n; ++i) out.push_back({capacity, static_cast<int64_t>(i)});
  return out;
}

// Enumerates all m^n assignments.
double BruteForceMakespan(const std::vector<TableLoad>& tables,
                          const std::vector<ShardDevice>& devices) {
  const size_t n = tables.size(), m = devices.size();
  size_t total = 1;
  for (size_t i = 0; i < n; ++i) total *= m;
  double best = INFINITY;
  for (size_t code = 0; code < total; ++code) {
    std::vector<double> load(m, 0);
    std::vector<uint64_t> bytes(m, 0);
    size_t c = code;
    for (size_t t = 0; t < n; ++t, c /= m) {
      load[c % m] += tables[t].load;
      bytes[c % m] += tables[t].size;
    }
    bool fits = true;
    for (size_t d = 0; d < m; ++d) fits &= bytes[d] <= devices[d].capacity;
    if (fits) best = std::min(best, *std::max_element(load.begin(), load.end()));
  }
  return best;
}

SparseFeatureSpec Table(uint64_t rows, double pooling = 4) {
  SparseFeatureSpec s;
  s.hash_size = rows;
  s.mean_pooling = pooling;
  return s;
}

ModelConfig ModelWith(std::vector<SparseFeatureSpec> tables, int64_t batch = 100) {
  return MakeModel(16, std::move(tables), {64}, {64},
                   {InteractionKind::kDotPairwise, 64}, batch);
}

TEST(ShardTablesLpt, TwoDeviceExample) {
  const auto a = ShardTablesLpt(Loads({10, 7, 5, 3}), Devices(2));
  EXPECT_EQ(a.makespan, 13);
  // {10, 3} and {7, 5}.
  EXPECT_EQ(a.device_of[0], a.device_of[3]);
  EXPECT_EQ(a.device_of[1], a.device_of[2]);
  EXPECT_NE(a.device_of[0], a.device_of[1]);
}

TEST(ShardTablesLpt, EqualLoadsSpreadOut) {
  const auto a = ShardTablesLpt(Loads({6, 6, 6}), Devices(3));
  EXPECT_EQ(a.makespan, 6);
  EXPECT_EQ(a.device_of, (std::vector<size_t>{0, 1, 2}));
}

TEST(ShardTablesLpt, RespectsCapacity) {
  const std::vector<TableLoad> tables = {{0, 10, 9}, {1, 10, 9}};
  const std::vector<ShardDevice> devices = {{10, 0}, {100, 1}};
  const auto a = ShardTablesLpt(tables, devices);
  EXPECT_EQ(a.device_of, (std::vector<size_t>{0, 1}));
  EXPECT_EQ(a.makespan, 9);
  EXPECT_EQ(ShardTablesExact(tables, devices).makespan, 9);
}

TEST(ShardTablesLpt, InfeasibleWhenNothingFits) {
  const std::vector<TableLoad> tables = {{0, 60, 1}, {1, 60, 1}};
  EXPECT_THROW(ShardTablesLpt(tables, {{100, 0}}), InfeasibleError);
  try {
    ShardTablesLpt(tables, {{50, 0}, {50, 1}});
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.needed(), 120u);
    EXPECT_EQ(e.available(), 100u);
  }
}

TEST(ShardTablesExact, Examples) {
  EXPECT_EQ(ShardTablesExact(Loads({10, 7, 5, 3}), Devices(2)).makespan, 13);
  EXPECT_EQ(ShardTablesExact(Loads({42}), Devices(3)).makespan, 42);
}

TEST(ShardTablesExact, TooLarge) {
  EXPECT_THROW(ShardTablesExact(Loads(std::vector<double>(13, 1)), Devices(2)),
               TooLargeError);
  EXPECT_THROW(ShardTablesExact(Loads({1}), Devices(5)), TooLargeError);
}

TEST(ShardTablesExact, MatchesBruteForceWithCapacities) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + rng() % 7, m = 1 + rng() % 3;
    std::vector<TableLoad> tables;
    for (size_t t = 0; t < n; ++t) {
      tables.push_back({static_cast<int64_t>(t), 1 + rng() % 10,
                        static_cast<double>(1 + rng() % 100)});
    }
    std::vector<ShardDevice> devices;
    for (size_t d = 0; d < m; ++d) {
      devices.push_back({10 + rng() % 30, static_cast<int64_t>(d)});
    }
    const double oracle = BruteForceMakespan(tables, devices);
    if (!std::isfinite(oracle)) {
      EXPECT_THROW(ShardTablesExact(tables, devices), InfeasibleError);
      continue;
    }
    EXPECT_EQ(ShardTablesExact(tables, devices).makespan, oracle);
  }
}

TEST(ShardTablesLpt, ClassicalBoundAgainstBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const size_t n = 1 + rng() % 8, m = 1 + rng() % 3;
    std::vector<double> loads;
    for (size_t t = 0; t < n; ++t) {
      loads.push_back(1 + 99 * std::generate_canonical<double, 53>(rng));
    }
    const auto tables = Loads(loads);
    const auto devices = Devices(m);
    const double lpt = ShardTablesLpt(tables, devices).makespan;
    const double opt = BruteForceMakespan(tables, devices);
    EXPECT_LE(lpt, (4.0 / 3 - 1.0 / (3 * m)) * opt * (1 + 1e-12));
    EXPECT_GE(lpt, opt * (1 - 1e-12));  // sums differ only in order
  }
}

TEST(ShardTables, LoadsAndBytesAreConsistent) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TableLoad> tables;
    for (int t = 0; t < 8; ++t) {
      tables.push_back({t, 1 + rng() % 5, static_cast<double>(rng() % 50)});
    }
    const auto devices = Devices(3, 20);
    for (const auto& a : {ShardTablesLpt(tables, devices),
                          ShardTablesExact(tables, devices)}) {
      std::vector<double> load(3, 0);
      std::vector<uint64_t> bytes(3, 0);
      for (size_t t = 0; t < tables.size(); ++t) {
        load[a.device_of[t]] += tables[t].load;
        bytes[a.device_of[t]] += tables[t].size;
      }
      EXPECT_EQ(load, a.device_load);
      EXPECT_EQ(bytes, a.device_bytes);
      EXPECT_EQ(a.makespan, *std::max_element(load.begin(), load.end()));
    }
  }
}

TEST(PlanPlacement, TooLargeForBigBasinGpus) {
  // 300 GB of tables against 256 GiB of GPU memory.
  std::vector<SparseFeatureSpec> tables(30, Table(39062500));  // 10 GB each
  const ModelConfig m = ModelWith(tables);
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  EXPECT_THROW(PlanPlacement(m, bb, GpuMemoryPlacement{}), InfeasibleError);
  EXPECT_THROW(PlanPlacement(m, bb, GpuMemoryPlacement{Partition::kRowWise}),
               InfeasibleError);
  EXPECT_THROW(PlanPlacement(m, bb, HostMemoryPlacement{}), InfeasibleError);
  EXPECT_NO_THROW(PlanPlacement(m, bb, RemotePsPlacement{2}));
  EXPECT_NO_THROW(PlanPlacement(m, PlatformPreset("ZionPrototype"),
                                HostMemoryPlacement{}));
}

TEST(PlanPlacement, GpuStrategiesNeedGpus) {
  const ModelConfig m = ModelWith({Table(100)});
  EXPECT_THROW(PlanPlacement(m, PlatformPreset("CPU"), GpuMemoryPlacement{}),
               InfeasibleError);
}

TEST(PlanPlacement, M2FitsOnBigBasinGpus) {
  const ModelConfig m2 = ProductionPreset("M2");
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  const PlacementPlan plan = PlanPlacement(m2, bb, GpuMemoryPlacement{});
  EXPECT_TRUE(ValidatePlan(plan, m2, bb).empty());
  EXPECT_LT(TotalEmbeddingBytes(m2), 100e9);
}

TEST(PlanPlacement, RowWiseSplitsEvenly) {
  const ModelConfig m = ModelWith({Table(1000)});
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  const PlacementPlan plan =
      PlanPlacement(m, bb, GpuMemoryPlacement{Partition::kRowWise});
  ASSERT_EQ(plan.shards.size(), 8u);
  uint64_t next = 0;
  for (const auto& s : plan.shards) {
    EXPECT_EQ(s.row_begin, next);
    EXPECT_EQ(s.rows(), 125u);
    next = s.row_end;
  }
  EXPECT_EQ(next, 1000u);
}

TEST(PlanPlacement, RowWiseBytesWithinOneRow) {
  std::mt19937_64 rng(2);
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SparseFeatureSpec> tables;
    const size_t n = 1 + rng() % 20;
    for (size_t t = 0; t < n; ++t) tables.push_back(Table(1 + rng() % 5000));
    const ModelConfig m = ModelWith(tables);
    const PlacementPlan plan =
        PlanPlacement(m, bb, GpuMemoryPlacement{Partition::kRowWise});
    EXPECT_TRUE(ValidatePlan(plan, m, bb).empty());
    uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& d : plan.devices) {
      lo = std::min(lo, d.bytes);
      hi = std::max(hi, d.bytes);
    }
    EXPECT_LE(hi - lo, 64u * 4) << "trial " << trial;
  }
}

TEST(PlanPlacement, TableWiseUsesFewestGpusThatFit) {
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  // 4 tables of 10 GiB: two fit per 32 GiB GPU, so two GPUs.
  std::vector<SparseFeatureSpec> tables(4, Table(10 * kGiB / 256));
  const PlacementPlan plan = PlanPlacement(ModelWith(tables), bb, GpuMemoryPlacement{});
  std::map<int, int> per_gpu;
  for (const auto& s : plan.shards) ++per_gpu[s.location.index];
  EXPECT_EQ(per_gpu.size(), 2u);
}

TEST(PlanPlacement, HostAndRemote) {
  const ModelConfig m = ModelWith({Table(1000, 10), Table(1000, 7),
                                   Table(1000, 5), Table(1000, 3)});
  const PlatformSpec cpu = PlatformPreset("CPU");
  const PlacementPlan host = PlanPlacement(m, cpu, HostMemoryPlacement{});
  for (const auto& s : host.shards) EXPECT_EQ(s.location, Location::HostPool());
  EXPECT_TRUE(ValidatePlan(host, m, cpu).empty());

  const PlacementPlan ps = PlanPlacement(m, cpu, RemotePsPlacement{2});
  EXPECT_TRUE(ValidatePlan(ps, m, cpu).empty());
  // Pooling 10 and 3 share a server, 7 and 5 the other.
  EXPECT_EQ(ps.shards[0].location, ps.shards[3].location);
  EXPECT_EQ(ps.shards[1].location, ps.shards[2].location);
  EXPECT_EQ(ps.shards[0].location.kind, Location::Kind::kRemoteServer);
}

TEST(PlanPlacement, HybridTinyBudgetIsHostMemory) {
  const ModelConfig m = ModelWith({Table(100000), Table(200000, 9), Table(5000, 1)});
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  const PlacementPlan plan = PlanPlacement(m, bb, HybridPlacement{1e-12});
  for (const auto& s : plan.shards) EXPECT_EQ(s.location, Location::HostPool());
  EXPECT_TRUE(ValidatePlan(plan, m, bb).empty());
}

TEST(PlanPlacement, HybridFullBudgetMatchesTableWise) {
  const ModelConfig m = ModelWith({Table(100000, 2), Table(200000, 9),
                                   Table(5000, 1), Table(70000, 30)});
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  const PlacementPlan hybrid = PlanPlacement(m, bb, HybridPlacement{1.0});
  const PlacementPlan gpu = PlanPlacement(m, bb, GpuMemoryPlacement{});
  EXPECT_EQ(hybrid.shards, gpu.shards);
}

TEST(PlanPlacement, HybridSpillsLowestDensityTablesToHost) {
  // A 1% budget is ~343 MB per GPU: one 256 MB table each, the rest spill.
  std::vector<SparseFeatureSpec> tables;
  for (int i = 0; i < 20; ++i) tables.push_back(Table(1000000, 1 + i));  // 256 MB
  const ModelConfig m = ModelWith(tables);
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  const PlacementPlan plan = PlanPlacement(m, bb, HybridPlacement{0.01});
  EXPECT_TRUE(ValidatePlan(plan, m, bb).empty());
  double min_gpu_pooling = INFINITY, max_host_pooling = 0;
  for (const auto& s : plan.shards) {
    const double p = m.sparse[s.table_id].mean_pooling;
    if (s.location.kind == Location::Kind::kGpu) {
      min_gpu_pooling = std::min(min_gpu_pooling, p);
    } else {
      max_host_pooling = std::max(max_host_pooling, p);
    }
  }
  EXPECT_GT(max_host_pooling, 0);
  EXPECT_GT(min_gpu_pooling, max_host_pooling);
}

TEST(PlanPlacement, Deterministic) {
  const ModelConfig m = ProductionPreset("M1");
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  for (const PlacementStrategy& s :
       {PlacementStrategy{GpuMemoryPlacement{}},
        PlacementStrategy{GpuMemoryPlacement{Partition::kRowWise}},
        PlacementStrategy{HostMemoryPlacement{}},
        PlacementStrategy{RemotePsPlacement{5}},
        PlacementStrategy{HybridPlacement{0.1}}}) {
    EXPECT_EQ(PlanPlacement(m, bb, s), PlanPlacement(m, bb, s));
    EXPECT_TRUE(ValidatePlan(PlanPlacement(m, bb, s), m, bb).empty());
  }
}

TEST(ValidatePlan, DetectsOverlapAndGaps) {
  const ModelConfig m = ModelWith({Table(100)});
  const PlatformSpec bb = PlatformPreset("BigBasin32");
  PlacementPlan plan = PlanPlacement(m, bb, GpuMemoryPlacement{});
  plan.shards.push_back({0, 50, 100, Location::Gpu(1)});
  auto v = ValidatePlan(plan, m, bb);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("rows covered twice"), std::string::npos);

  plan.shards = {{0, 0, 60, Location::Gpu(0)}};
  v = ValidatePlan(plan, m, bb);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("rows not covered"), std::string::npos);

  plan.shards = {{0, 0, 100, Location::Gpu(8)}};
  EXPECT_FALSE(ValidatePlan(plan, m, bb).empty());
}

TEST(ValidatePlan, CapacityBoundaryIsExact) {
  const PlatformSpec bb = PlatformPreset("BigBasin16");
  // One table of exactly 16 GiB fits; the same plan on a GPU one byte
  // smaller does not.
  const ModelConfig m = ModelWith({Table(16 * kGiB / 256)});
  const PlacementPlan plan = PlanPlacement(m, bb, GpuMemoryPlacement{});
  EXPECT_TRUE(ValidatePlan(plan, m, bb).empty());

  PlatformSpec smaller = bb;
  smaller.gpus[0].mem_capacity -= 1;
  const auto v = ValidatePlan(plan, m, smaller);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("over capacity"), std::string::npos);
}

}  // namespace
}  // namespace recshard
