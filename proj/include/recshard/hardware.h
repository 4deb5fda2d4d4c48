// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_HARDWARE_H_
#define RECSHARD_HARDWARE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recshard {

enum class DeviceKind { kCpuSocket, kGpu };

struct DeviceSpec {
  DeviceKind kind = DeviceKind::kCpuSocket;
  uint64_t mem_capacity = 0;       // bytes
  double mem_bandwidth = 0;        // bytes/s
  double compute = 0;              // peak flops/s
  double per_op_overhead = 0;      // seconds per dispatched op
  double per_lookup_overhead = 0;  // seconds per embedding row gathered
  int cores = 1;

  void Validate() const;
  bool operator==(const DeviceSpec&) const = default;
};

enum class LinkKind { kGpuP2P, kHostStaging, kNetwork };

struct LinkSpec {
  double bandwidth = 0;  // bytes/s
  double latency = 0;    // seconds
  LinkKind kind = LinkKind::kNetwork;

  void Validate() const;
  bool operator==(const LinkSpec&) const = default;
};

struct PlatformSpec {
  std::string name;
  std::vector<DeviceSpec> cpu_sockets;
  std::vector<DeviceSpec> gpus;
  LinkSpec intra_gpu_link;
  LinkSpec host_device_link;
  LinkSpec nic;
  // Normalized so a dual-socket CPU server is 1.0. Unset when unknown.
  std::optional<double> power_units;

  void Validate() const;
  bool has_gpus() const { return !gpus.empty(); }
  bool operator==(const PlatformSpec&) const = default;
};

// "CPU", "BigBasin16", "BigBasin32", "ZionPrototype".
PlatformSpec PlatformPreset(std::string_view name);
std::vector<std::string> PlatformPresetNames();

enum class AggregateScope { kHostMem, kGpuMem, kHostBw, kGpuBw, kCpuFlops, kGpuFlops };

double Aggregate(const PlatformSpec& platform, AggregateScope scope);

int TotalCpuCores(const PlatformSpec& platform);

// Endpoint of a transfer. kRemote names any device on another node.
struct DeviceRef {
  enum class Kind { kCpu, kGpu, kRemote };
  Kind kind = Kind::kCpu;
  int index = 0;

  static DeviceRef Cpu(int i) { return {Kind::kCpu, i}; }
  static DeviceRef Gpu(int i) { return {Kind::kGpu, i}; }
  static DeviceRef Remote(int i) { return {Kind::kRemote, i}; }
};

// The link a transfer between two devices travels over. GPU pairs without
// peer-to-peer support are staged through host memory. Throws ConfigError for
// devices the platform does not have.
LinkSpec EffectiveLink(const PlatformSpec& platform, DeviceRef src,
                       DeviceRef dst);

}  // namespace recshard

#endif  // RECSHARD_HARDWARE_H_
