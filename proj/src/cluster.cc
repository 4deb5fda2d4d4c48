// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/cluster.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "recshard/error.h"
#include "recshard/format.h"
#include "recshard/parallel.h"

namespace recshard {

void ValidateTopology(const ClusterTopology& topo,
                      const PlacementStrategy& strategy) {
  if (topo.num_trainers < 1) {
    throw InvalidTopologyError("num_trainers must be >= 1");
  }
  if (topo.num_dense_ps < 0 || topo.num_sparse_ps < 0 ||
      topo.num_readers < 0) {
    throw InvalidTopologyError("server and reader counts must be >= 0");
  }
  if (topo.sync.period < 1) {
    throw InvalidTopologyError("sync period must be >= 1");
  }
  if (topo.sync.hogwild_threads < 1) {
    throw InvalidTopologyError("hogwild_threads must be >= 1");
  }
  // Above 1 the speedup would fall as trainers are added.
  if (!(topo.sync.scaling_penalty >= 0 && topo.sync.scaling_penalty <= 1)) {
    throw InvalidTopologyError("scaling penalty must be in [0, 1]");
  }
  if (const auto* ps = std::get_if<RemotePsPlacement>(&strategy)) {
    if (topo.num_sparse_ps < 1) {
      throw InvalidTopologyError("remote_ps placement needs sparse_ps >= 1");
    }
    if (ps->num_servers > topo.num_sparse_ps) {
      throw InvalidTopologyError(
          "remote_ps/" + std::to_string(ps->num_servers) + " needs " +
          std::to_string(ps->num_servers) + " sparse servers, topology has " +
          std::to_string(topo.num_sparse_ps));
    }
  }
}

double ClusterSpeedup(int num_trainers, double scaling_penalty) {
  const double n = num_trainers;
  return n / (1 + scaling_penalty * (n - 1));
}

TrainerEnvironment TrainerEnvironmentFor(const ClusterTopology& topo,
                                         TrainerEnvironment base) {
  base.hogwild_threads = topo.sync.hogwild_threads;
  const bool has_peer = topo.num_dense_ps >= 1 || topo.num_trainers > 1;
  if (!has_peer) {
    base.sync_period = 0;
  } else if (topo.sync.method == SyncMethod::kFullySync) {
    base.sync_period = 1;
  } else {
    base.sync_period = topo.sync.period;
  }
  return base;
}

ClusterBreakdown ClusterThroughput(const ModelConfig& model,
                                   const PlatformSpec& trainer_platform,
                                   const PlacementStrategy& strategy,
                                   const ClusterTopology& topo,
                                   const CalibrationCoefficients& coeffs,
                                   TrainerEnvironment env) {
  ValidateTopology(topo, strategy);
  env = TrainerEnvironmentFor(topo, std::move(env));
  ClusterBreakdown out;
  out.trainer = Simulate(model, trainer_platform, strategy, coeffs, env);
  out.speedup = ClusterSpeedup(topo.num_trainers, topo.sync.scaling_penalty);
  out.throughput = out.trainer.throughput * out.speedup;

  const int servers = topo.num_dense_ps + topo.num_sparse_ps;
  if (trainer_platform.power_units &&
      (servers == 0 || env.ps_platform.power_units)) {
    double power = topo.num_trainers * *trainer_platform.power_units;
    if (servers > 0) power += servers * *env.ps_platform.power_units;
    out.power_units = power;
    out.power_efficiency = PowerEfficiency(out.throughput, power);
  }
  return out;
}

std::vector<PsServerUtilization> PsUtilization(
    const ModelConfig& model, const PlacementPlan& plan,
    const ClusterTopology& topo, double iteration_time,
    const PlatformSpec& ps_platform) {
  const auto* ps = std::get_if<RemotePsPlacement>(&plan.strategy);
  if (!ps) throw ConfigError("ps utilization needs a remote_ps placement");
  ValidateTopology(topo, plan.strategy);
  if (!(iteration_time > 0)) {
    throw ConfigError("iteration time must be > 0");
  }

  std::vector<double> load(ps->num_servers, 0.0);
  for (const auto& s : plan.shards) {
    if (s.location.kind != Location::Kind::kRemoteServer) continue;
    const auto& spec = model.sparse.at(s.table_id);
    const double frac =
        static_cast<double>(s.rows()) / static_cast<double>(spec.hash_size);
    load.at(s.location.index) +=
        static_cast<double>(LookupBytesPerIteration(spec, model.batch_size)) *
        frac;
  }
  const double busiest = *std::max_element(load.begin(), load.end());

  std::vector<PsServerUtilization> out;
  out.reserve(load.size());
  for (size_t i = 0; i < load.size(); ++i) {
    PsServerUtilization u;
    u.server = static_cast<int>(i);
    u.load_fraction = busiest > 0 ? load[i] / busiest : 1.0;
    // Request plus response bytes from every trainer, once per iteration.
    const double rate = 2 * load[i] * topo.num_trainers / iteration_time;
    u.nic = std::clamp(rate / ps_platform.nic.bandwidth, 0.0, 1.0);
    out.push_back(u);
  }
  return out;
}

std::vector<UtilizationSample> SamplePopulationUtilization(
    const SynthPopulationParams& params, const PlatformSpec& platform,
    const PlacementStrategy& strategy, const ClusterTopology& topo,
    const CalibrationCoefficients& coeffs, size_t runs, uint64_t seed,
    int threads) {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  params.Validate();
  ValidateTopology(topo, strategy);

  // Draw serially so the population is independent of the thread count.
  SynthRng rng(seed);
  std::vector<ModelConfig> models;
  models.reserve(runs);
  for (size_t i = 0; i < runs; ++i) {
    models.push_back(DrawSyntheticModel(params, rng));
  }

  const TrainerEnvironment env = TrainerEnvironmentFor(topo);
  std::vector<UtilizationSample> samples(runs);
  ParallelFor(
      runs,
      [&](size_t i) {
        samples[i].sample_id = i;
        try {
          samples[i].utilization =
              Simulate(models[i], platform, strategy, coeffs, env).utilization;
        } catch (const InfeasibleError&) {
          samples[i].feasible = false;
        }
      },
      threads);
  return samples;
}

std::string UtilizationSamplesCsv(
    const std::vector<UtilizationSample>& samples) {
  std::string out = CsvLine({"sample_id", "cpu", "host_bw", "nic"});
  for (const auto& s : samples) {
    if (!s.feasible) {
      out += CsvLine({std::to_string(s.sample_id), "", "", ""});
      continue;
    }
    out += CsvLine({std::to_string(s.sample_id),
                    FormatDouble(s.utilization.cpu),
                    FormatDouble(s.utilization.host_bw),
                    FormatDouble(s.utilization.nic)});
  }
  return out;
}

}  // namespace recshard
