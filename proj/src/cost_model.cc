// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/cost_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "recshard/error.h"

namespace recshard {
namespace {

constexpr double kDenseParamBytes = 4.0;

bool InUnitInterval(double x, bool open_below) {
  return (open_below ? x > 0 : x >= 0) && x <= 1;
}

// Combined per-lookup cost of devices gathering in parallel.
double ParallelPerLookup(const std::vector<DeviceSpec>& devices) {
  double rate = 0;
  for (const auto& d : devices) {
    if (d.per_lookup_overhead == 0) return 0;
    rate += 1.0 / d.per_lookup_overhead;
  }
  return rate > 0 ? 1.0 / rate : 0;
}

struct EmbDevice {
  double bandwidth = 0;
  double per_lookup = 0;
  double bytes = 0;
  double lookups = 0;
};

EmbDevice DeviceModel(const Location& loc, const PlatformSpec& platform,
                      const TrainerEnvironment& env) {
  switch (loc.kind) {
    case Location::Kind::kGpu: {
      if (loc.index < 0 ||
          static_cast<size_t>(loc.index) >= platform.gpus.size()) {
        throw ConfigError("plan references " + loc.Name() +
                          " which the platform lacks");
      }
      const auto& g = platform.gpus[loc.index];
      return {g.mem_bandwidth, g.per_lookup_overhead};
    }
    case Location::Kind::kHostPool:
      return {Aggregate(platform, AggregateScope::kHostBw),
              ParallelPerLookup(platform.cpu_sockets)};
    case Location::Kind::kRemoteServer:
      return {Aggregate(env.ps_platform, AggregateScope::kHostBw),
              ParallelPerLookup(env.ps_platform.cpu_sockets)};
  }
  return {};
}

double PooledBytes(const SparseFeatureSpec& spec, int64_t batch) {
  return static_cast<double>(batch) * spec.embedding_dim *
         spec.bytes_per_element;
}

// Flop rate the dense part runs at: every GPU when present, otherwise the CPU
// cores the Hogwild workers can drive.
double DenseCompute(const PlatformSpec& platform,
                    const TrainerEnvironment& env) {
  if (platform.has_gpus()) return Aggregate(platform, AggregateScope::kGpuFlops);
  const double total = Aggregate(platform, AggregateScope::kCpuFlops);
  if (!env.hogwild_threads) return total;
  const int cores = TotalCpuCores(platform);
  const int per_worker = platform.cpu_sockets.front().cores;
  const int usable =
      std::min<int64_t>(int64_t{*env.hogwild_threads} * per_worker, cores);
  return total * usable / cores;
}

double DenseOpOverhead(const PlatformSpec& platform) {
  return platform.has_gpus() ? platform.gpus.front().per_op_overhead
                             : platform.cpu_sockets.front().per_op_overhead;
}

int RemoteServers(const PlacementPlan& plan) {
  if (const auto* r = std::get_if<RemotePsPlacement>(&plan.strategy)) {
    return r->num_servers;
  }
  return 0;
}

}  // namespace

void CalibrationCoefficients::Validate() const {
  if (!InUnitInterval(compute_efficiency, /*open_below=*/true)) {
    throw ConfigError("compute_efficiency must be in (0, 1]");
  }
  if (!InUnitInterval(overlap, /*open_below=*/false)) {
    throw ConfigError("overlap must be in [0, 1]");
  }
  for (double v : {backward_ratio_dense, backward_ratio_emb,
                   host_processing_cost, per_op_overhead_scale}) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw ConfigError("calibration coefficients must be finite and >= 0");
    }
  }
}

CalibrationCoefficients DefaultCoefficients() {
  CalibrationCoefficients c;
  c.compute_efficiency = 0.7;
  c.overlap = 0.0;
  c.per_op_overhead_scale = 20.0;
  c.host_processing_cost = 1e-10;
  return c;
}

void TrainerEnvironment::Validate() const {
  if (hogwild_threads && *hogwild_threads < 1) {
    throw ConfigError("hogwild_threads must be >= 1");
  }
  if (!(sync_period >= 0)) throw ConfigError("sync period must be >= 0");
  if (!(reader_bandwidth > 0)) {
    throw ConfigError("reader bandwidth must be > 0");
  }
  ps_platform.Validate();
}

std::string_view StageName(Stage stage) {
  static constexpr std::array<std::string_view, kNumStages> kNames = {
      "data_read",        "emb_forward",   "emb_backward",   "comm_alltoall",
      "comm_ps",          "host_device_copy", "dense_forward", "dense_backward",
      "interaction",      "dense_sync",
  };
  return kNames[static_cast<size_t>(stage)];
}

double StageTimes::Sum() const {
  double total = 0;
  for (double s : seconds) total += s;
  return total;
}

double StageTimes::Max() const {
  return *std::max_element(seconds.begin(), seconds.end());
}

StageTimes ComputeStageTimes(const ModelConfig& model,
                             const PlatformSpec& platform,
                             const PlacementPlan& plan,
                             const CalibrationCoefficients& coeffs,
                             const TrainerEnvironment& env) {
  const int64_t batch = model.batch_size;
  const double scale = coeffs.per_op_overhead_scale;
  StageTimes st;

  // Embedding gather on every device that holds rows; devices run in parallel.
  std::map<Location, EmbDevice> emb;
  std::set<int64_t> gpu_tables;
  std::set<int> gpu_holders;
  double offload_bytes = 0;  // pooled outputs crossing PCIe
  double remote_bytes = 0;   // lookup bytes served by remote servers
  for (const auto& s : plan.shards) {
    const auto& spec = model.sparse.at(s.table_id);
    const double frac =
        static_cast<double>(s.rows()) / static_cast<double>(spec.hash_size);
    auto it = emb.find(s.location);
    if (it == emb.end()) {
      it = emb.emplace(s.location, DeviceModel(s.location, platform, env)).first;
    }
    const double bytes =
        static_cast<double>(LookupBytesPerIteration(spec, batch)) * frac;
    it->second.bytes += bytes;
    it->second.lookups +=
        static_cast<double>(LookupsPerIteration(spec, batch)) * frac;
    if (s.location.kind == Location::Kind::kGpu) {
      gpu_tables.insert(s.table_id);
      gpu_holders.insert(s.location.index);
    } else {
      offload_bytes += PooledBytes(spec, batch) * frac;
      if (s.location.kind == Location::Kind::kRemoteServer) {
        remote_bytes += bytes;
      }
    }
  }
  for (const auto& [loc, d] : emb) {
    const double gather = d.lookups * d.per_lookup;
    st[Stage::kEmbForward] =
        std::max(st[Stage::kEmbForward], d.bytes / d.bandwidth + gather);
    st[Stage::kEmbBackward] =
        std::max(st[Stage::kEmbBackward],
                 coeffs.backward_ratio_emb * d.bytes / d.bandwidth + gather);
  }

  // GPU-to-GPU traffic: pooled embedding exchange plus the data-parallel
  // dense-gradient all-reduce.
  const size_t num_gpus = platform.gpus.size();
  if (num_gpus > 1) {
    const LinkSpec link =
        EffectiveLink(platform, DeviceRef::Gpu(0), DeviceRef::Gpu(1));
    const bool staged = link.kind == LinkKind::kHostStaging;
    const double pcie = platform.host_device_link.bandwidth;
    const size_t k = gpu_holders.size();
    if (k > 1) {
      const auto* gpu = std::get_if<GpuMemoryPlacement>(&plan.strategy);
      const bool row_wise = gpu && gpu->partition == Partition::kRowWise;
      const double peers = row_wise ? static_cast<double>(k)
                                    : static_cast<double>(k - 1);
      double table_bytes = 0;
      for (int64_t t : gpu_tables) {
        table_bytes += PooledBytes(model.sparse[t], batch);
      }
      const double bytes = peers * table_bytes;
      const double messages = peers * static_cast<double>(gpu_tables.size());
      const double per_message =
          link.latency + platform.gpus.front().per_op_overhead * scale;
      st[Stage::kCommAllToAll] +=
          2 * (bytes / link.bandwidth + messages * per_message);
      if (staged) st[Stage::kHostDeviceCopy] += 2 * bytes / pcie;
    }
    const double g = static_cast<double>(num_gpus);
    const double ring_bytes = 2 * (g - 1) / g *
                              static_cast<double>(DenseParamCount(model)) *
                              kDenseParamBytes;
    st[Stage::kCommAllToAll] +=
        ring_bytes / link.bandwidth + 2 * (g - 1) * link.latency;
    if (staged) st[Stage::kHostDeviceCopy] += ring_bytes / pcie;
  }

  // Host- or remote-resident pooled outputs fan out to the GPUs over PCIe.
  if (num_gpus > 0 && offload_bytes > 0) {
    const auto& pcie = platform.host_device_link;
    st[Stage::kHostDeviceCopy] +=
        2 * offload_bytes / (static_cast<double>(num_gpus) * pcie.bandwidth) +
        2 * pcie.latency;
  }

  if (remote_bytes > 0) {
    const int servers = RemoteServers(plan);
    const int lanes = std::max(
        1, std::min(servers, static_cast<int>(platform.cpu_sockets.size())));
    st[Stage::kCommPs] = 2 * remote_bytes / platform.nic.bandwidth +
                         platform.nic.latency +
                         coeffs.host_processing_cost * remote_bytes / lanes;
  }

  const double rate = DenseCompute(platform, env) * coeffs.compute_efficiency;
  const double mlp = static_cast<double>(MlpFlops(model.bottom_mlp, batch)) +
                     static_cast<double>(MlpFlops(model.top_mlp, batch));
  const double layers = static_cast<double>(model.bottom_mlp.num_layers() +
                                            model.top_mlp.num_layers());
  const double op_cost = layers * DenseOpOverhead(platform) * scale;
  st[Stage::kDenseForward] = mlp / rate + op_cost;
  st[Stage::kDenseBackward] = coeffs.backward_ratio_dense * mlp / rate + op_cost;
  st[Stage::kInteraction] =
      (1 + coeffs.backward_ratio_dense) * static_cast<double>(batch) *
      static_cast<double>(InteractionFlops(model).total()) / rate;

  if (env.sync_period > 0) {
    st[Stage::kDenseSync] = 2 * static_cast<double>(DenseParamCount(model)) *
                            kDenseParamBytes / platform.nic.bandwidth /
                            env.sync_period;
  }

  if (std::isfinite(env.reader_bandwidth)) {
    double sample_bytes = static_cast<double>(model.dense_count) * 4;
    for (const auto& spec : model.sparse) {
      sample_bytes += std::min(spec.mean_pooling,
                               static_cast<double>(spec.truncation)) * 8;
    }
    st[Stage::kDataRead] =
        static_cast<double>(batch) * sample_bytes / env.reader_bandwidth;
  }
  return st;
}

double IterationTime(const StageTimes& stages,
                     const CalibrationCoefficients& coeffs) {
  const double total = stages.Sum();
  if (coeffs.overlap == 0) return total;
  const double emb = stages[Stage::kEmbForward] + stages[Stage::kEmbBackward];
  const double dense =
      stages[Stage::kDenseForward] + stages[Stage::kDenseBackward];
  return std::max(total - coeffs.overlap * std::min(emb, dense), stages.Max());
}

Utilization ComputeUtilization(const StageTimes& st, double iteration_time,
                               const PlatformSpec& platform,
                               const PlacementPlan& plan) {
  bool on_gpu = false;
  bool on_host = false;
  for (const auto& s : plan.shards) {
    on_gpu |= s.location.kind == Location::Kind::kGpu;
    on_host |= s.location.kind == Location::Kind::kHostPool;
  }
  const double emb = st[Stage::kEmbForward] + st[Stage::kEmbBackward];
  const double dense = st[Stage::kDenseForward] + st[Stage::kDenseBackward] +
                       st[Stage::kInteraction];
  auto frac = [&](double busy) {
    if (!(iteration_time > 0)) return 0.0;
    return std::clamp(busy / iteration_time, 0.0, 1.0);
  };
  Utilization u;
  u.cpu = frac((platform.has_gpus() ? 0.0 : dense) + (on_host ? emb : 0.0));
  u.host_bw = frac((on_host ? emb : 0.0) + st[Stage::kHostDeviceCopy]);
  u.gpu_bw = frac((on_gpu ? emb : 0.0) + st[Stage::kCommAllToAll]);
  u.nic = frac(st[Stage::kCommPs] + st[Stage::kDenseSync] +
               st[Stage::kDataRead]);
  return u;
}

double PowerEfficiency(double& throughput, double power_units) {
  double eff = throughput / power_units;
  if (eff * power_units == throughput) return eff;
  double up = eff;
  double down = eff;
  for (int i = 0; i < 8; ++i) {
    up = std::nextafter(up, INFINITY);
    if (up * power_units == throughput) return up;
    down = std::nextafter(down, 0.0);
    if (down * power_units == throughput) return down;
  }
  throughput = eff * power_units;
  return eff;
}

std::optional<double> TrainerPower(const PlatformSpec& platform,
                                   const PlacementPlan& plan,
                                   const TrainerEnvironment& env) {
  if (!platform.power_units) return std::nullopt;
  double power = *platform.power_units;
  if (const int servers = RemoteServers(plan); servers > 0) {
    if (!env.ps_platform.power_units) return std::nullopt;
    power += servers * *env.ps_platform.power_units;
  }
  return power;
}

CostBreakdown Evaluate(const ModelConfig& model, const PlatformSpec& platform,
                       const PlacementPlan& plan,
                       const CalibrationCoefficients& coeffs,
                       const TrainerEnvironment& env) {
  coeffs.Validate();
  env.Validate();
  CostBreakdown out;
  out.stages = ComputeStageTimes(model, platform, plan, coeffs, env);
  out.iteration_time = IterationTime(out.stages, coeffs);
  out.throughput = static_cast<double>(model.batch_size) / out.iteration_time;
  out.power_units = TrainerPower(platform, plan, env);
  if (out.power_units) {
    out.power_efficiency = PowerEfficiency(out.throughput, *out.power_units);
  }
  out.utilization =
      ComputeUtilization(out.stages, out.iteration_time, platform, plan);
  return out;
}

CostBreakdown Simulate(const ModelConfig& model, const PlatformSpec& platform,
                       const PlacementStrategy& strategy,
                       const CalibrationCoefficients& coeffs,
                       const TrainerEnvironment& env) {
  ValidateModel(model);
  platform.Validate();
  const PlacementPlan plan = PlanPlacement(model, platform, strategy);
  return Evaluate(model, platform, plan, coeffs, env);
}

}  // namespace recshard
