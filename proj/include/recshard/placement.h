// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_PLACEMENT_H_
#define RECSHARD_PLACEMENT_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "recshard/hardware.h"
#include "recshard/model.h"

namespace recshard {

enum class Partition { kTableWise, kRowWise };

struct GpuMemoryPlacement {
  Partition partition = Partition::kTableWise;
  bool operator==(const GpuMemoryPlacement&) const = default;
};

struct HostMemoryPlacement {
  bool operator==(const HostMemoryPlacement&) const = default;
};

struct RemotePsPlacement {
  int num_servers = 1;
  bool operator==(const RemotePsPlacement&) const = default;
};

struct HybridPlacement {
  double gpu_budget_fraction = 1.0;
  bool operator==(const HybridPlacement&) const = default;
};

using PlacementStrategy = std::variant<GpuMemoryPlacement, HostMemoryPlacement,
                                       RemotePsPlacement, HybridPlacement>;

void ValidateStrategy(const PlacementStrategy& strategy);

// Short stable label, e.g. "gpu_memory/table_wise", "remote_ps/8".
std::string StrategyLabel(const PlacementStrategy& strategy);

// Where a shard lives. The host pool is the trainer's combined system memory.
struct Location {
  enum class Kind { kGpu, kHostPool, kRemoteServer };
  Kind kind = Kind::kHostPool;
  int index = 0;

  static Location Gpu(int i) { return {Kind::kGpu, i}; }
  static Location HostPool() { return {Kind::kHostPool, 0}; }
  static Location Remote(int i) { return {Kind::kRemoteServer, i}; }

  std::string Name() const;  // "gpu3", "host", "ps1"
  auto operator<=>(const Location&) const = default;
};

// Rows [row_begin, row_end) of one table.
struct Shard {
  int64_t table_id = 0;
  uint64_t row_begin = 0;
  uint64_t row_end = 0;
  Location location;

  uint64_t rows() const { return row_end - row_begin; }
  bool operator==(const Shard&) const = default;
};

struct DeviceUsage {
  Location location;
  uint64_t capacity = 0;  // bytes
  uint64_t bytes = 0;
  double load = 0;  // bytes touched per iteration

  bool operator==(const DeviceUsage&) const = default;
};

struct PlacementPlan {
  PlacementStrategy strategy;
  std::vector<Shard> shards;
  // Every device the strategy could use, in a fixed order. Unused ones carry
  // zero bytes.
  std::vector<DeviceUsage> devices;

  double Makespan() const;
  bool operator==(const PlacementPlan&) const = default;
};

// Balancing inputs. `load` is bytes touched per iteration.
struct TableLoad {
  int64_t table_id = 0;
  uint64_t size = 0;
  double load = 0;
};

struct ShardDevice {
  uint64_t capacity = 0;
  int64_t id = 0;
};

struct ShardAssignment {
  // device_of[i] is the position in the device list for tables[i].
  std::vector<size_t> device_of;
  std::vector<double> device_load;
  std::vector<uint64_t> device_bytes;
  double makespan = 0;
};

// Longest-processing-time greedy. Tables go in order of descending load (then
// ascending id) to the capacity-feasible device with the least load (then the
// lowest id). Throws InfeasibleError when a table fits nowhere.
ShardAssignment ShardTablesLpt(const std::vector<TableLoad>& tables,
                               const std::vector<ShardDevice>& devices);

inline constexpr size_t kExactMaxTables = 12;
inline constexpr size_t kExactMaxDevices = 4;

// Exhaustive minimum-makespan search. Among optimal assignments the
// lexicographically smallest device_of vector wins. Throws TooLargeError past
// kExactMaxTables / kExactMaxDevices.
ShardAssignment ShardTablesExact(const std::vector<TableLoad>& tables,
                                 const std::vector<ShardDevice>& devices);

// Size and per-iteration load of every table in `model`, ids = positions.
std::vector<TableLoad> TableLoads(const ModelConfig& model);

// Capacity available to one remote parameter server: a CPU-preset host.
uint64_t RemoteServerCapacity();

PlacementPlan PlanPlacement(const ModelConfig& model,
                            const PlatformSpec& platform,
                            const PlacementStrategy& strategy);

// Coverage, capacity and device-validity problems in `plan`, one message per
// violation. Empty means valid.
std::vector<std::string> ValidatePlan(const PlacementPlan& plan,
                                      const ModelConfig& model,
                                      const PlatformSpec& platform);

}  // namespace recshard

#endif  // RECSHARD_PLACEMENT_H_
