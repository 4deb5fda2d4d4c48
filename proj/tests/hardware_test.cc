// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "recshard/error.h"
#include "recshard/hardware.h"
#include "recshard/json_io.h"

namespace recshard {
namespace {

constexpr double kGiB = 1024.0 * 1024 * 1024;

TEST(PlatformPreset, BigBasinMemory) {
  const PlatformSpec p = PlatformPreset("BigBasin32");
  EXPECT_EQ(p.gpus.size(), 8u);
  EXPECT_EQ(Aggregate(p, AggregateScope::kGpuMem), 2.74877906944e11);
  EXPECT_EQ(Aggregate(PlatformPreset("BigBasin16"), AggregateScope::kGpuMem),
            128 * kGiB);
  EXPECT_EQ(p.gpus[0].compute, 15.7e12);
  EXPECT_EQ(p.gpus[0].mem_bandwidth, 900e9);
  EXPECT_EQ(p.nic.bandwidth, 100e9 / 8);
}

TEST(PlatformPreset, Zion) {
  const PlatformSpec p = PlatformPreset("ZionPrototype");
  EXPECT_EQ(Aggregate(p, AggregateScope::kHostMem), 2048 * kGiB);
  EXPECT_EQ(Aggregate(p, AggregateScope::kHostBw), 1e12);
  EXPECT_EQ(p.intra_gpu_link.kind, LinkKind::kHostStaging);
  EXPECT_FALSE(p.power_units.has_value());
  EXPECT_EQ(p.nic.bandwidth, 400e9 / 8);
}

TEST(PlatformPreset, CpuServer) {
  const PlatformSpec p = PlatformPreset("CPU");
  EXPECT_EQ(p.cpu_sockets.size(), 2u);
  EXPECT_EQ(Aggregate(p, AggregateScope::kHostMem), 256 * kGiB);
  EXPECT_EQ(Aggregate(p, AggregateScope::kGpuFlops), 0);
  EXPECT_EQ(TotalCpuCores(p), 40);
  EXPECT_EQ(p.nic.bandwidth, 25e9 / 8);
}

TEST(PlatformPreset, PowerUnits) {
  EXPECT_EQ(*PlatformPreset("CPU").power_units, 1.0);
  EXPECT_EQ(*PlatformPreset("BigBasin32").power_units, 7.3);
  EXPECT_EQ(*PlatformPreset("BigBasin16").power_units, 7.3);
}

TEST(PlatformPreset, UnknownName) {
  EXPECT_THROW(PlatformPreset("TPU"), ConfigError);
}

TEST(PlatformPreset, AllValidateAndRoundTrip) {
  for (const auto& name : PlatformPresetNames()) {
    const PlatformSpec p = PlatformPreset(name);
    EXPECT_NO_THROW(p.Validate());
    const Json j = PlatformToJson(p);
    EXPECT_EQ(PlatformFromJson(j), p) << name;
    // Through text as well: doubles must survive printing.
    EXPECT_EQ(PlatformFromJson(ParseJson(DumpJson(j), name)), p) << name;
  }
}

TEST(EffectiveLink, BigBasinGpuPairUsesNvlink) {
  const PlatformSpec p = PlatformPreset("BigBasin32");
  const LinkSpec l = EffectiveLink(p, DeviceRef::Gpu(0), DeviceRef::Gpu(1));
  EXPECT_EQ(l.kind, LinkKind::kGpuP2P);
  EXPECT_EQ(l.bandwidth, 150e9);
}

TEST(EffectiveLink, ZionGpuPairIsStagedWithDoubledLatency) {
  const PlatformSpec p = PlatformPreset("ZionPrototype");
  const LinkSpec l = EffectiveLink(p, DeviceRef::Gpu(0), DeviceRef::Gpu(1));
  EXPECT_EQ(l.kind, LinkKind::kHostStaging);
  EXPECT_EQ(l.latency, 2 * p.host_device_link.latency);
  EXPECT_LE(l.bandwidth, p.host_device_link.bandwidth);
}

TEST(EffectiveLink, RemoteAlwaysUsesNic) {
  for (const auto& name : PlatformPresetNames()) {
    const PlatformSpec p = PlatformPreset(name);
    const LinkSpec l = EffectiveLink(p, DeviceRef::Cpu(0), DeviceRef::Remote(3));
    EXPECT_EQ(l.kind, LinkKind::kNetwork) << name;
    EXPECT_EQ(l.bandwidth, p.nic.bandwidth) << name;
    if (p.has_gpus()) {
      EXPECT_EQ(EffectiveLink(p, DeviceRef::Gpu(2), DeviceRef::Remote(0)).kind,
                LinkKind::kNetwork);
    }
  }
}

TEST(EffectiveLink, NeverFasterThanEitherEndpointMemory) {
  PlatformSpec p = PlatformPreset("BigBasin32");
  p.gpus[1].mem_bandwidth = 50e9;  // slower than NVLink
  p.cpu_sockets[0].mem_bandwidth = 8e9;  // slower than PCIe
  for (const auto& name : PlatformPresetNames()) {
    for (const PlatformSpec& q : {PlatformPreset(name), p}) {
      std::vector<DeviceRef> refs = {DeviceRef::Cpu(0), DeviceRef::Cpu(1),
                                     DeviceRef::Remote(0)};
      for (int g = 0; g < static_cast<int>(q.gpus.size()); ++g) {
        refs.push_back(DeviceRef::Gpu(g));
      }
      auto mem_bw = [&](DeviceRef r) -> double {
        if (r.kind == DeviceRef::Kind::kCpu) return q.cpu_sockets[r.index].mem_bandwidth;
        if (r.kind == DeviceRef::Kind::kGpu) return q.gpus[r.index].mem_bandwidth;
        return INFINITY;
      };
      for (DeviceRef a : refs) {
        for (DeviceRef b : refs) {
          const LinkSpec l = EffectiveLink(q, a, b);
          EXPECT_LE(l.bandwidth, mem_bw(a));
          EXPECT_LE(l.bandwidth, mem_bw(b));
          EXPECT_GT(l.bandwidth, 0);
        }
      }
    }
  }
}

TEST(EffectiveLink, BadIndexIsConfigError) {
  const PlatformSpec p = PlatformPreset("CPU");
  EXPECT_THROW(EffectiveLink(p, DeviceRef::Gpu(0), DeviceRef::Cpu(0)),
               ConfigError);
  EXPECT_THROW(EffectiveLink(p, DeviceRef::Cpu(2), DeviceRef::Cpu(0)),
               ConfigError);
}

TEST(Aggregate, SplittingADeviceLeavesTotalsUnchanged) {
  const PlatformSpec p = PlatformPreset("BigBasin32");
  PlatformSpec split = p;
  DeviceSpec half = p.gpus[0];
  half.mem_capacity /= 2;
  half.mem_bandwidth /= 2;
  half.compute /= 2;
  split.gpus[0] = half;
  split.gpus.push_back(half);
  DeviceSpec socket = p.cpu_sockets[1];
  socket.mem_capacity /= 2;
  socket.mem_bandwidth /= 2;
  socket.compute /= 2;
  split.cpu_sockets[1] = socket;
  split.cpu_sockets.push_back(socket);
  for (auto scope : {AggregateScope::kHostMem, AggregateScope::kGpuMem,
                     AggregateScope::kHostBw, AggregateScope::kGpuBw,
                     AggregateScope::kCpuFlops, AggregateScope::kGpuFlops}) {
    EXPECT_EQ(Aggregate(split, scope), Aggregate(p, scope));
  }
}

TEST(Validate, RejectsBrokenSpecs) {
  PlatformSpec p = PlatformPreset("BigBasin32");
  p.cpu_sockets.clear();
  EXPECT_THROW(p.Validate(), ConfigError);

  p = PlatformPreset("BigBasin32");
  p.gpus[3].mem_bandwidth = 0;
  EXPECT_THROW(p.Validate(), ConfigError);

  p = PlatformPreset("BigBasin32");
  p.nic.latency = -1;
  EXPECT_THROW(p.Validate(), ConfigError);

  p = PlatformPreset("BigBasin32");
  p.power_units = 0;
  EXPECT_THROW(p.Validate(), ConfigError);

  p = PlatformPreset("CPU");
  p.gpus.clear();  // GPU-less platforms are fine
  EXPECT_NO_THROW(p.Validate());
}

}  // namespace
}  // namespace recshard
