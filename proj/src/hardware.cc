// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/hardware.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "recshard/error.h"

namespace recshard {
namespace {

constexpr uint64_t kGiB = uint64_t{1} << 30;

bool PositiveFinite(double x) { return x > 0 && std::isfinite(x); }

DeviceSpec CpuSocket(uint64_t mem_capacity, double mem_bandwidth) {
  DeviceSpec socket;
  socket.kind = DeviceKind::kCpuSocket;
  socket.mem_capacity = mem_capacity;
  socket.mem_bandwidth = mem_bandwidth;
  socket.cores = 20;
  socket.compute = 20 * 32e9;  // 32 GFLOP/s per core, SIMD fp32
  socket.per_op_overhead = 2e-6;
  socket.per_lookup_overhead = 80e-9;
  return socket;
}

DeviceSpec V100(uint64_t mem_capacity) {
  DeviceSpec gpu;
  gpu.kind = DeviceKind::kGpu;
  gpu.mem_capacity = mem_capacity;
  gpu.mem_bandwidth = 900e9;
  gpu.compute = 15.7e12;
  gpu.per_op_overhead = 10e-6;
  gpu.per_lookup_overhead = 5e-9;
  gpu.cores = 1;
  return gpu;
}

constexpr LinkSpec kPcie{16e9, 5e-6, LinkKind::kHostStaging};
constexpr LinkSpec kNvlink{150e9, 5e-6, LinkKind::kGpuP2P};

LinkSpec Nic(double gbits) { return {gbits * 1e9 / 8, 10e-6, LinkKind::kNetwork}; }

PlatformSpec BigBasin(std::string name, uint64_t gpu_mem) {
  PlatformSpec p;
  p.name = std::move(name);
  p.cpu_sockets.assign(2, CpuSocket(128 * kGiB, 100e9));
  p.gpus.assign(8, V100(gpu_mem));
  p.intra_gpu_link = kNvlink;
  p.host_device_link = kPcie;
  p.nic = Nic(100);
  p.power_units = 7.3;
  return p;
}

double MemBandwidth(const PlatformSpec& platform, DeviceRef ref) {
  switch (ref.kind) {
    case DeviceRef::Kind::kCpu:
      return platform.cpu_sockets[ref.index].mem_bandwidth;
    case DeviceRef::Kind::kGpu:
      return platform.gpus[ref.index].mem_bandwidth;
    case DeviceRef::Kind::kRemote:
      break;
  }
  return INFINITY;
}

void CheckRef(const PlatformSpec& platform, DeviceRef ref) {
  auto in_range = [&](size_t n) {
    return ref.index >= 0 && static_cast<size_t>(ref.index) < n;
  };
  bool ok = true;
  switch (ref.kind) {
    case DeviceRef::Kind::kCpu:
      ok = in_range(platform.cpu_sockets.size());
      break;
    case DeviceRef::Kind::kGpu:
      ok = in_range(platform.gpus.size());
      break;
    case DeviceRef::Kind::kRemote:
      ok = ref.index >= 0;
      break;
  }
  if (!ok) {
    throw ConfigError("platform " + platform.name + " has no device #" +
                      std::to_string(ref.index) + " of the requested kind");
  }
}

}  // namespace

void DeviceSpec::Validate() const {
  if (mem_capacity == 0) throw ConfigError("device mem_capacity must be > 0");
  if (!PositiveFinite(mem_bandwidth)) {
    throw ConfigError("device mem_bandwidth must be > 0");
  }
  if (!PositiveFinite(compute)) throw ConfigError("device compute must be > 0");
  if (!(per_op_overhead >= 0) || !std::isfinite(per_op_overhead)) {
    throw ConfigError("device per_op_overhead must be >= 0");
  }
  if (!(per_lookup_overhead >= 0) || !std::isfinite(per_lookup_overhead)) {
    throw ConfigError("device per_lookup_overhead must be >= 0");
  }
  if (cores < 1) throw ConfigError("device cores must be >= 1");
}

void LinkSpec::Validate() const {
  if (!PositiveFinite(bandwidth)) throw ConfigError("link bandwidth must be > 0");
  if (!(latency >= 0) || !std::isfinite(latency)) {
    throw ConfigError("link latency must be >= 0");
  }
}

void PlatformSpec::Validate() const {
  if (cpu_sockets.empty()) {
    throw ConfigError("platform " + name + " needs at least one CPU socket");
  }
  for (const auto& s : cpu_sockets) {
    if (s.kind != DeviceKind::kCpuSocket) {
      throw ConfigError("cpu_sockets entries must have kind cpu_socket");
    }
    s.Validate();
  }
  for (const auto& g : gpus) {
    if (g.kind != DeviceKind::kGpu) {
      throw ConfigError("gpus entries must have kind gpu");
    }
    g.Validate();
  }
  intra_gpu_link.Validate();
  host_device_link.Validate();
  nic.Validate();
  if (power_units && !PositiveFinite(*power_units)) {
    throw ConfigError("power_units must be > 0");
  }
}

PlatformSpec PlatformPreset(std::string_view name) {
  if (name == "CPU") {
    PlatformSpec p;
    p.name = "CPU";
    p.cpu_sockets.assign(2, CpuSocket(128 * kGiB, 100e9));
    // Unused without GPUs but kept valid so the spec round-trips.
    p.intra_gpu_link = kPcie;
    p.host_device_link = kPcie;
    p.nic = Nic(25);
    p.power_units = 1.0;
    return p;
  }
  if (name == "BigBasin16") return BigBasin("BigBasin16", 16 * kGiB);
  if (name == "BigBasin32") return BigBasin("BigBasin32", 32 * kGiB);
  if (name == "ZionPrototype") {
    PlatformSpec p;
    p.name = "ZionPrototype";
    // 8 x 125 GB/s = 1 TB/s aggregate, 8 x 256 GiB = 2 TiB.
    p.cpu_sockets.assign(8, CpuSocket(256 * kGiB, 125e9));
    p.gpus.assign(8, V100(32 * kGiB));
    // The prototype had no peer-to-peer path; GPU traffic is staged through
    // host memory over PCIe.
    p.intra_gpu_link = kPcie;
    p.host_device_link = kPcie;
    p.nic = Nic(400);
    p.power_units = std::nullopt;
    return p;
  }
  throw ConfigError("unknown platform preset '" + std::string(name) + "'");
}

std::vector<std::string> PlatformPresetNames() {
  return {"CPU", "BigBasin16", "BigBasin32", "ZionPrototype"};
}

double Aggregate(const PlatformSpec& platform, AggregateScope scope) {
  double total = 0;
  switch (scope) {
    case AggregateScope::kHostMem:
      for (const auto& d : platform.cpu_sockets) total += d.mem_capacity;
      break;
    case AggregateScope::kGpuMem:
      for (const auto& d : platform.gpus) total += d.mem_capacity;
      break;
    case AggregateScope::kHostBw:
      for (const auto& d : platform.cpu_sockets) total += d.mem_bandwidth;
      break;
    case AggregateScope::kGpuBw:
      for (const auto& d : platform.gpus) total += d.mem_bandwidth;
      break;
    case AggregateScope::kCpuFlops:
      for (const auto& d : platform.cpu_sockets) total += d.compute;
      break;
    case AggregateScope::kGpuFlops:
      for (const auto& d : platform.gpus) total += d.compute;
      break;
  }
  return total;
}

int TotalCpuCores(const PlatformSpec& platform) {
  int cores = 0;
  for (const auto& s : platform.cpu_sockets) cores += s.cores;
  return cores;
}

LinkSpec EffectiveLink(const PlatformSpec& platform, DeviceRef src,
                       DeviceRef dst) {
  CheckRef(platform, src);
  CheckRef(platform, dst);
  using Kind = DeviceRef::Kind;
  LinkSpec link;
  if (src.kind == Kind::kRemote || dst.kind == Kind::kRemote) {
    link = platform.nic;
  } else if (src.kind == Kind::kGpu && dst.kind == Kind::kGpu) {
    if (platform.intra_gpu_link.kind == LinkKind::kGpuP2P) {
      link = platform.intra_gpu_link;
    } else {
      const double fair_share = Aggregate(platform, AggregateScope::kHostBw) /
                                static_cast<double>(platform.gpus.size());
      link.bandwidth = std::min(platform.host_device_link.bandwidth, fair_share);
      link.latency = 2 * platform.host_device_link.latency;
      link.kind = LinkKind::kHostStaging;
    }
  } else if (src.kind == Kind::kCpu && dst.kind == Kind::kCpu) {
    // Socket to socket moves through host memory.
    link.bandwidth = INFINITY;
    link.latency = 0;
    link.kind = LinkKind::kHostStaging;
  } else {
    link = platform.host_device_link;
  }
  link.bandwidth = std::min({link.bandwidth, MemBandwidth(platform, src),
                             MemBandwidth(platform, dst)});
  return link;
}

}  // namespace recshard
