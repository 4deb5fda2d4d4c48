// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_CLUSTER_H_
#define RECSHARD_CLUSTER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recshard/cost_model.h"
#include "recshard/hardware.h"
#include "recshard/model.h"
#include "recshard/placement.h"

namespace recshard {

enum class SyncMethod { kEasgd, kFullySync };

struct SyncConfig {
  SyncMethod method = SyncMethod::kEasgd;
  // EASGD communication period in iterations. FullySync always syncs every
  // iteration and ignores it.
  int period = 1;
  int hogwild_threads = 1;
  double scaling_penalty = 0.0;  // sigma

  bool operator==(const SyncConfig&) const = default;
};

struct ClusterTopology {
  int num_trainers = 1;
  int num_dense_ps = 0;
  int num_sparse_ps = 0;
  int num_readers = 0;
  SyncConfig sync;

  bool operator==(const ClusterTopology&) const = default;
};

// Throws InvalidTopologyError. A RemotePS strategy needs at least as many
// sparse parameter servers as it shards across.
void ValidateTopology(const ClusterTopology& topo,
                      const PlacementStrategy& strategy);

// n / (1 + sigma * (n - 1)). Nondecreasing in n for sigma in [0, 1].
double ClusterSpeedup(int num_trainers, double scaling_penalty);

// Per-trainer environment implied by a topology. Dense parameters are pushed
// only when there is someone to push to: a dense PS or a peer trainer.
TrainerEnvironment TrainerEnvironmentFor(const ClusterTopology& topo,
                                         TrainerEnvironment base = {});

struct ClusterBreakdown {
  CostBreakdown trainer;  // one trainer, sync and Hogwild applied
  double speedup = 1;
  double throughput = 0;  // samples/s over the whole cluster
  // Trainers plus every dense and sparse server; unset if any is unknown.
  std::optional<double> power_units;
  std::optional<double> power_efficiency;
};

// Scales one trainer's cost to the topology. The trainer's plan is built with
// PlanPlacement. Throws InvalidTopologyError and InfeasibleError.
ClusterBreakdown ClusterThroughput(const ModelConfig& model,
                                   const PlatformSpec& trainer_platform,
                                   const PlacementStrategy& strategy,
                                   const ClusterTopology& topo,
                                   const CalibrationCoefficients& coeffs,
                                   TrainerEnvironment env = {});

struct PsServerUtilization {
  int server = 0;
  double load_fraction = 0;  // bytes touched / busiest server's bytes touched
  double nic = 0;            // fraction of the server NIC, in [0, 1]
};

// Per-server balance for a RemotePS plan. NIC utilization assumes every
// trainer issues the plan's traffic once per iteration of length
// `iteration_time`. Throws ConfigError for other placements.
std::vector<PsServerUtilization> PsUtilization(const ModelConfig& model,
                                               const PlacementPlan& plan,
                                               const ClusterTopology& topo,
                                               double iteration_time,
                                               const PlatformSpec& ps_platform);

struct UtilizationSample {
  size_t sample_id = 0;
  bool feasible = true;
  Utilization utilization;
};

// Draws `runs` models from one stream seeded with `seed` (params.seed is
// ignored) and evaluates a trainer of the topology on each. Infeasible models
// yield samples with feasible = false and zero utilization.
std::vector<UtilizationSample> SamplePopulationUtilization(
    const SynthPopulationParams& params, const PlatformSpec& platform,
    const PlacementStrategy& strategy, const ClusterTopology& topo,
    const CalibrationCoefficients& coeffs, size_t runs, uint64_t seed,
    int threads);

// sample_id, cpu, host_bw, nic; infeasible samples leave the three
// utilization fields empty.
std::string UtilizationSamplesCsv(const std::vector<UtilizationSample>& samples);

}  // namespace recshard

#endif  // RECSHARD_CLUSTER_H_
