// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/placement.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "recshard/error.h"

namespace recshard {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

uint64_t SumSizes(const std::vector<TableLoad>& tables) {
  uint64_t total = 0;
  for (const auto& t : tables) {
    if (__builtin_add_overflow(total, t.size, &total)) {
      throw OverflowError("total table size overflows 64 bits");
    }
  }
  return total;
}

uint64_t SumCapacity(const std::vector<ShardDevice>& devices) {
  uint64_t total = 0;
  for (const auto& d : devices) {
    // Saturate: a huge "uncapacitated" device is common in tests.
    if (__builtin_add_overflow(total, d.capacity, &total)) {
      return std::numeric_limits<uint64_t>::max();
    }
  }
  return total;
}

void CheckTotals(const std::vector<TableLoad>& tables,
                 const std::vector<ShardDevice>& devices) {
  if (devices.empty() && !tables.empty()) {
    throw InfeasibleError(SumSizes(tables), 0, "no devices to place tables on");
  }
  const uint64_t needed = SumSizes(tables);
  const uint64_t available = SumCapacity(devices);
  if (needed > available) {
    throw InfeasibleError(needed, available,
                          "tables exceed the combined device capacity");
  }
}

ShardAssignment EmptyAssignment(size_t num_tables, size_t num_devices) {
  ShardAssignment out;
  out.device_of.assign(num_tables, 0);
  out.device_load.assign(num_devices, 0.0);
  out.device_bytes.assign(num_devices, 0);
  return out;
}

double MaxOf(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// Smallest per-device capacity prefix on which LPT succeeds.
struct PrefixFit {
  size_t count = 0;
  ShardAssignment assignment;
};

PrefixFit LptOnSmallestPrefix(const std::vector<TableLoad>& tables,
                              const std::vector<ShardDevice>& devices) {
  CheckTotals(tables, devices);
  for (size_t k = 1; k <= devices.size(); ++k) {
    std::vector<ShardDevice> prefix(devices.begin(), devices.begin() + k);
    if (SumSizes(tables) > SumCapacity(prefix)) continue;
    try {
      return {k, ShardTablesLpt(tables, prefix)};
    } catch (const InfeasibleError&) {
      if (k == devices.size()) throw;
    }
  }
  // Reached only with no tables.
  return {devices.empty() ? 0 : size_t{1},
          EmptyAssignment(tables.size(), devices.empty() ? 0 : 1)};
}

std::vector<DeviceUsage> GpuUsages(const PlatformSpec& platform) {
  std::vector<DeviceUsage> out;
  for (size_t i = 0; i < platform.gpus.size(); ++i) {
    out.push_back({Location::Gpu(static_cast<int>(i)),
                   platform.gpus[i].mem_capacity, 0, 0});
  }
  return out;
}

DeviceUsage HostUsage(const PlatformSpec& platform) {
  return {Location::HostPool(),
          static_cast<uint64_t>(Aggregate(platform, AggregateScope::kHostMem)),
          0, 0};
}

void AddWholeTable(PlacementPlan& plan, const ModelConfig& model,
                   int64_t table, Location loc) {
  plan.shards.push_back({table, 0, model.sparse[table].hash_size, loc});
}

// Recomputes per-device totals from the shard list.
void Tally(PlacementPlan& plan, const ModelConfig& model) {
  for (auto& d : plan.devices) {
    d.bytes = 0;
    d.load = 0;
  }
  for (const auto& s : plan.shards) {
    const auto& spec = model.sparse[s.table_id];
    const uint64_t row_bytes =
        uint64_t{spec.embedding_dim} * spec.bytes_per_element;
    const double table_load =
        static_cast<double>(LookupBytesPerIteration(spec, model.batch_size));
    for (auto& d : plan.devices) {
      if (d.location != s.location) continue;
      d.bytes += s.rows() * row_bytes;
      d.load += table_load * static_cast<double>(s.rows()) /
                static_cast<double>(spec.hash_size);
    }
  }
}

void RequireGpus(const PlatformSpec& platform) {
  if (platform.gpus.empty()) {
    throw InfeasibleError(0, 0,
                          "GPU memory placement on platform " + platform.name +
                              " which has no GPUs");
  }
}

PlacementPlan PlanTableWise(const ModelConfig& model,
                            const PlatformSpec& platform,
                            PlacementPlan plan) {
  RequireGpus(platform);
  const auto tables = TableLoads(model);
  std::vector<ShardDevice> devices;
  for (size_t i = 0; i < platform.gpus.size(); ++i) {
    devices.push_back({platform.gpus[i].mem_capacity, static_cast<int64_t>(i)});
  }
  const PrefixFit fit = LptOnSmallestPrefix(tables, devices);
  for (size_t t = 0; t < tables.size(); ++t) {
    AddWholeTable(plan, model, tables[t].table_id,
                  Location::Gpu(static_cast<int>(fit.assignment.device_of[t])));
  }
  return plan;
}

PlacementPlan PlanRowWise(const ModelConfig& model,
                          const PlatformSpec& platform, PlacementPlan plan) {
  RequireGpus(platform);
  const size_t g = platform.gpus.size();
  const auto tables = TableLoads(model);
  std::vector<ShardDevice> devices;
  for (size_t i = 0; i < g; ++i) {
    devices.push_back({platform.gpus[i].mem_capacity, static_cast<int64_t>(i)});
  }
  CheckTotals(tables, devices);
  std::vector<uint64_t> bytes(g, 0);
  for (size_t t = 0; t < model.sparse.size(); ++t) {
    const auto& spec = model.sparse[t];
    const uint64_t row_bytes =
        uint64_t{spec.embedding_dim} * spec.bytes_per_element;
    std::vector<uint64_t> rows(g, spec.hash_size / g);
    // Remainder rows go to the GPUs holding the fewest bytes so far, which
    // keeps the per-GPU footprint within one row across many tables.
    std::vector<size_t> order(g);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return bytes[a] < bytes[b]; });
    for (uint64_t r = 0; r < spec.hash_size % g; ++r) ++rows[order[r]];
    uint64_t begin = 0;
    for (size_t i = 0; i < g; ++i) {
      if (rows[i] == 0) continue;
      plan.shards.push_back({static_cast<int64_t>(t), begin, begin + rows[i],
                             Location::Gpu(static_cast<int>(i))});
      begin += rows[i];
      bytes[i] += rows[i] * row_bytes;
    }
  }
  for (size_t i = 0; i < g; ++i) {
    if (bytes[i] > platform.gpus[i].mem_capacity) {
      throw InfeasibleError(bytes[i], platform.gpus[i].mem_capacity,
                            "row-wise shard overflows gpu" + std::to_string(i));
    }
  }
  return plan;
}

PlacementPlan PlanHost(const ModelConfig& model, const PlatformSpec& platform,
                       PlacementPlan plan) {
  const uint64_t needed = TotalEmbeddingBytes(model);
  const uint64_t available = plan.devices.back().capacity;
  if (needed > available) {
    throw InfeasibleError(needed, available,
                          "tables exceed host memory of " + platform.name);
  }
  for (size_t t = 0; t < model.sparse.size(); ++t) {
    AddWholeTable(plan, model, static_cast<int64_t>(t), Location::HostPool());
  }
  return plan;
}

PlacementPlan PlanRemote(const ModelConfig& model, int num_servers,
                         PlacementPlan plan) {
  const auto tables = TableLoads(model);
  std::vector<ShardDevice> devices;
  for (int i = 0; i < num_servers; ++i) {
    devices.push_back({RemoteServerCapacity(), i});
  }
  CheckTotals(tables, devices);
  const ShardAssignment a = ShardTablesLpt(tables, devices);
  for (size_t t = 0; t < tables.size(); ++t) {
    AddWholeTable(plan, model, tables[t].table_id,
                  Location::Remote(static_cast<int>(a.device_of[t])));
  }
  return plan;
}

PlacementPlan PlanHybrid(const ModelConfig& model, const PlatformSpec& platform,
                         double fraction, PlacementPlan plan) {
  const auto tables = TableLoads(model);
  // Densest tables first: most bytes touched per byte of GPU memory.
  std::vector<size_t> order(tables.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double da = tables[a].load / static_cast<double>(tables[a].size);
    const double db = tables[b].load / static_cast<double>(tables[b].size);
    return da > db;
  });
  std::vector<ShardDevice> devices;
  for (size_t i = 0; i < platform.gpus.size(); ++i) {
    const auto cap = static_cast<uint64_t>(
        std::floor(fraction * static_cast<double>(platform.gpus[i].mem_capacity)));
    devices.push_back({cap, static_cast<int64_t>(i)});
  }
  const uint64_t budget = SumCapacity(devices);
  std::vector<size_t> admitted;
  uint64_t used = 0;
  for (size_t idx : order) {
    if (tables[idx].size <= budget - used) {
      admitted.push_back(idx);
      used += tables[idx].size;
    }
  }
  std::vector<size_t> gpu_of(tables.size(), SIZE_MAX);
  while (!admitted.empty()) {
    std::vector<TableLoad> subset;
    for (size_t idx : admitted) subset.push_back(tables[idx]);
    try {
      const PrefixFit fit = LptOnSmallestPrefix(subset, devices);
      for (size_t i = 0; i < admitted.size(); ++i) {
        gpu_of[admitted[i]] = fit.assignment.device_of[i];
      }
      break;
    } catch (const InfeasibleError&) {
      admitted.pop_back();  // drop the least dense and retry
    }
  }
  uint64_t host_bytes = 0;
  for (size_t t = 0; t < tables.size(); ++t) {
    if (gpu_of[t] == SIZE_MAX) host_bytes += tables[t].size;
  }
  const uint64_t host_cap = plan.devices.back().capacity;
  if (host_bytes > host_cap) {
    throw InfeasibleError(host_bytes, host_cap,
                          "hybrid remainder exceeds host memory of " +
                              platform.name);
  }
  for (size_t t = 0; t < tables.size(); ++t) {
    AddWholeTable(plan, model, static_cast<int64_t>(t),
                  gpu_of[t] == SIZE_MAX
                      ? Location::HostPool()
                      : Location::Gpu(static_cast<int>(gpu_of[t])));
  }
  return plan;
}

}  // namespace

void ValidateStrategy(const PlacementStrategy& strategy) {
  std::visit(Overloaded{
                 [](const GpuMemoryPlacement&) {},
                 [](const HostMemoryPlacement&) {},
                 [](const RemotePsPlacement& s) {
                   if (s.num_servers < 1) {
                     throw ConfigError("remote_ps num_servers must be >= 1");
                   }
                 },
                 [](const HybridPlacement& s) {
                   if (!(s.gpu_budget_fraction > 0 &&
                         s.gpu_budget_fraction <= 1)) {
                     throw ConfigError(
                         "hybrid gpu_budget_fraction must be in (0, 1]");
                   }
                 },
             },
             strategy);
}

std::string StrategyLabel(const PlacementStrategy& strategy) {
  return std::visit(
      Overloaded{
          [](const GpuMemoryPlacement& s) -> std::string {
            return s.partition == Partition::kTableWise
                       ? "gpu_memory/table_wise"
                       : "gpu_memory/row_wise";
          },
          [](const HostMemoryPlacement&) -> std::string {
            return "host_memory";
          },
          [](const RemotePsPlacement& s) -> std::string {
            return "remote_ps/" + std::to_string(s.num_servers);
          },
          [](const HybridPlacement& s) -> std::string {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "hybrid/%g", s.gpu_budget_fraction);
            return buf;
          },
      },
      strategy);
}

std::string Location::Name() const {
  switch (kind) {
    case Kind::kGpu:
      return "gpu" + std::to_string(index);
    case Kind::kHostPool:
      return "host";
    case Kind::kRemoteServer:
      return "ps" + std::to_string(index);
  }
  return "?";
}

double PlacementPlan::Makespan() const {
  double m = 0;
  for (const auto& d : devices) m = std::max(m, d.load);
  return m;
}

ShardAssignment ShardTablesLpt(const std::vector<TableLoad>& tables,
                               const std::vector<ShardDevice>& devices) {
  CheckTotals(tables, devices);
  std::vector<size_t> order(tables.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (tables[a].load != tables[b].load) return tables[a].load > tables[b].load;
    return tables[a].table_id < tables[b].table_id;
  });
  ShardAssignment out = EmptyAssignment(tables.size(), devices.size());
  std::vector<uint64_t> remaining;
  for (const auto& d : devices) remaining.push_back(d.capacity);
  for (size_t idx : order) {
    const TableLoad& t = tables[idx];
    size_t best = SIZE_MAX;
    for (size_t d = 0; d < devices.size(); ++d) {
      if (remaining[d] < t.size) continue;
      if (best == SIZE_MAX || out.device_load[d] < out.device_load[best] ||
          (out.device_load[d] == out.device_load[best] &&
           devices[d].id < devices[best].id)) {
        best = d;
      }
    }
    if (best == SIZE_MAX) {
      const uint64_t largest =
          *std::max_element(remaining.begin(), remaining.end());
      throw InfeasibleError(t.size, largest,
                            "table " + std::to_string(t.table_id) +
                                " fits on no remaining device");
    }
    out.device_of[idx] = best;
    out.device_load[best] += t.load;
    out.device_bytes[best] += t.size;
    remaining[best] -= t.size;
  }
  out.makespan = MaxOf(out.device_load);
  return out;
}

ShardAssignment ShardTablesExact(const std::vector<TableLoad>& tables,
                                 const std::vector<ShardDevice>& devices) {
  if (tables.size() > kExactMaxTables || devices.size() > kExactMaxDevices) {
    throw TooLargeError("exact sharding supports at most " +
                        std::to_string(kExactMaxTables) + " tables and " +
                        std::to_string(kExactMaxDevices) + " devices");
  }
  CheckTotals(tables, devices);
  const size_t n = tables.size();
  const size_t m = devices.size();
  ShardAssignment best;
  best.makespan = INFINITY;
  std::vector<size_t> current(n, 0);
  std::vector<double> load(m, 0.0);
  std::vector<uint64_t> remaining;
  for (const auto& d : devices) remaining.push_back(d.capacity);

  // Depth-first in lexicographic order; only strictly better leaves replace
  // the incumbent, so ties resolve to the lexicographically first vector.
  auto recurse = [&](auto&& self, size_t t, double partial) -> void {
    if (partial >= best.makespan) return;
    if (t == n) {
      best.device_of = current;
      best.device_load = load;
      best.makespan = partial;
      return;
    }
    for (size_t d = 0; d < m; ++d) {
      if (remaining[d] < tables[t].size) continue;
      current[t] = d;
      const double before = load[d];
      load[d] += tables[t].load;
      remaining[d] -= tables[t].size;
      self(self, t + 1, std::max(partial, load[d]));
      load[d] = before;
      remaining[d] += tables[t].size;
    }
  };
  recurse(recurse, 0, 0.0);
  if (!std::isfinite(best.makespan)) {
    throw InfeasibleError(SumSizes(tables), SumCapacity(devices),
                          "no capacity-feasible assignment exists");
  }
  best.device_bytes.assign(m, 0);
  for (size_t t = 0; t < n; ++t) {
    best.device_bytes[best.device_of[t]] += tables[t].size;
  }
  return best;
}

std::vector<TableLoad> TableLoads(const ModelConfig& model) {
  std::vector<TableLoad> out;
  out.reserve(model.sparse.size());
  for (size_t t = 0; t < model.sparse.size(); ++t) {
    const auto& spec = model.sparse[t];
    out.push_back({static_cast<int64_t>(t), TableSizeBytes(spec),
                   static_cast<double>(
                       LookupBytesPerIteration(spec, model.batch_size))});
  }
  return out;
}

uint64_t RemoteServerCapacity() {
  static const uint64_t capacity = static_cast<uint64_t>(
      Aggregate(PlatformPreset("CPU"), AggregateScope::kHostMem));
  return capacity;
}

PlacementPlan PlanPlacement(const ModelConfig& model,
                            const PlatformSpec& platform,
                            const PlacementStrategy& strategy) {
  ValidateStrategy(strategy);
  PlacementPlan plan;
  plan.strategy = strategy;
  std::visit(
      Overloaded{
          [&](const GpuMemoryPlacement& s) {
            plan.devices = GpuUsages(platform);
            plan = s.partition == Partition::kTableWise
                       ? PlanTableWise(model, platform, std::move(plan))
                       : PlanRowWise(model, platform, std::move(plan));
          },
          [&](const HostMemoryPlacement&) {
            plan.devices = {HostUsage(platform)};
            plan = PlanHost(model, platform, std::move(plan));
          },
          [&](const RemotePsPlacement& s) {
            for (int i = 0; i < s.num_servers; ++i) {
              plan.devices.push_back(
                  {Location::Remote(i), RemoteServerCapacity(), 0, 0});
            }
            plan = PlanRemote(model, s.num_servers, std::move(plan));
          },
          [&](const HybridPlacement& s) {
            plan.devices = GpuUsages(platform);
            plan.devices.push_back(HostUsage(platform));
            plan = PlanHybrid(model, platform, s.gpu_budget_fraction,
                              std::move(plan));
          },
      },
      strategy);
  Tally(plan, model);
  return plan;
}

std::vector<std::string> ValidatePlan(const PlacementPlan& plan,
                                      const ModelConfig& model,
                                      const PlatformSpec& platform) {
  std::vector<std::string> violations;
  auto device_ok = [&](const Location& loc) {
    switch (loc.kind) {
      case Location::Kind::kGpu:
        return loc.index >= 0 &&
               static_cast<size_t>(loc.index) < platform.gpus.size();
      case Location::Kind::kHostPool:
        return loc.index == 0;
      case Location::Kind::kRemoteServer: {
        const auto* remote = std::get_if<RemotePsPlacement>(&plan.strategy);
        return remote != nullptr && loc.index >= 0 &&
               loc.index < remote->num_servers;
      }
    }
    return false;
  };
  auto capacity_of = [&](const Location& loc) -> uint64_t {
    switch (loc.kind) {
      case Location::Kind::kGpu:
        return platform.gpus[loc.index].mem_capacity;
      case Location::Kind::kHostPool:
        return static_cast<uint64_t>(
            Aggregate(platform, AggregateScope::kHostMem));
      case Location::Kind::kRemoteServer:
        return RemoteServerCapacity();
    }
    return 0;
  };

  std::map<int64_t, std::vector<std::pair<uint64_t, uint64_t>>> ranges;
  std::map<Location, uint64_t> bytes;
  for (const auto& s : plan.shards) {
    if (s.table_id < 0 ||
        static_cast<size_t>(s.table_id) >= model.sparse.size()) {
      violations.push_back("shard names unknown table " +
                           std::to_string(s.table_id));
      continue;
    }
    const auto& spec = model.sparse[s.table_id];
    if (s.row_begin >= s.row_end || s.row_end > spec.hash_size) {
      violations.push_back("table " + std::to_string(s.table_id) +
                           " has an invalid row range [" +
                           std::to_string(s.row_begin) + ", " +
                           std::to_string(s.row_end) + ")");
      continue;
    }
    if (!device_ok(s.location)) {
      violations.push_back("table " + std::to_string(s.table_id) +
                           " is placed on invalid device " +
                           s.location.Name());
      continue;
    }
    ranges[s.table_id].push_back({s.row_begin, s.row_end});
    bytes[s.location] +=
        s.rows() * uint64_t{spec.embedding_dim} * spec.bytes_per_element;
  }
  for (size_t t = 0; t < model.sparse.size(); ++t) {
    auto& r = ranges[static_cast<int64_t>(t)];
    std::sort(r.begin(), r.end());
    uint64_t covered = 0;
    bool twice = false;
    bool gap = false;
    for (const auto& [b, e] : r) {
      if (b < covered) twice = true;
      if (b > covered) gap = true;
      covered = std::max(covered, e);
    }
    if (covered < model.sparse[t].hash_size) gap = true;
    if (twice) {
      violations.push_back("table " + std::to_string(t) +
                           ": rows covered twice");
    }
    if (gap) {
      violations.push_back("table " + std::to_string(t) +
                           ": rows not covered");
    }
  }
  for (const auto& [loc, used] : bytes) {
    const uint64_t cap = capacity_of(loc);
    if (used > cap) {
      violations.push_back("device " + loc.Name() + " over capacity: " +
                           std::to_string(used) + " > " + std::to_string(cap) +
                           " bytes");
    }
  }
  return violations;
}

}  // namespace recshard
