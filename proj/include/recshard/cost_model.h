// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_COST_MODEL_H_
#define RECSHARD_COST_MODEL_H_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "recshard/hardware.h"
#include "recshard/model.h"
#include "recshard/placement.h"

namespace recshard {

// Fitted knobs that turn peak hardware numbers into observed behaviour.
struct CalibrationCoefficients {
  double compute_efficiency = 1.0;    // fraction of peak flops, (0, 1]
  double overlap = 0.0;               // alpha, [0, 1]
  double backward_ratio_dense = 2.0;  // backward flops / forward flops
  double backward_ratio_emb = 2.0;    // rho: backward bytes / forward bytes
  double host_processing_cost = 0.0;  // seconds per byte on the PS path
  double per_op_overhead_scale = 1.0;

  void Validate() const;
  bool operator==(const CalibrationCoefficients&) const = default;
};

// The coefficients fitted to the M1 case-study datapoint; see
// presets/calibration_refs.json and presets/calibration_grid.json.
CalibrationCoefficients DefaultCoefficients();

// Inputs that live outside the model/platform/plan triple.
struct TrainerEnvironment {
  // Hogwild workers on a CPU trainer. Each drives one socket's cores; unset
  // means every core is usable.
  std::optional<int> hogwild_threads;
  // Dense parameters are pushed every `sync_period` iterations; 0 disables
  // dense synchronization.
  double sync_period = 0;
  // Reader ingest bandwidth in bytes/s; infinite by default.
  double reader_bandwidth = INFINITY;
  // The host serving remote shards.
  PlatformSpec ps_platform = PlatformPreset("CPU");

  void Validate() const;
};

enum class Stage : size_t {
  kDataRead,
  kEmbForward,
  kEmbBackward,
  kCommAllToAll,
  kCommPs,
  kHostDeviceCopy,
  kDenseForward,
  kDenseBackward,
  kInteraction,
  kDenseSync,
};
inline constexpr size_t kNumStages = 10;

// CSV column name, e.g. "emb_forward".
std::string_view StageName(Stage stage);

struct StageTimes {
  std::array<double, kNumStages> seconds{};

  double& operator[](Stage s) { return seconds[static_cast<size_t>(s)]; }
  double operator[](Stage s) const { return seconds[static_cast<size_t>(s)]; }
  // Left-to-right sum in stage order.
  double Sum() const;
  double Max() const;
};

struct Utilization {
  double cpu = 0;
  double host_bw = 0;
  double gpu_bw = 0;
  double nic = 0;
};

struct CostBreakdown {
  StageTimes stages;
  double iteration_time = 0;
  double throughput = 0;  // samples/s
  std::optional<double> power_units;
  // Unset when the platform has no power figure.
  std::optional<double> power_efficiency;
  Utilization utilization;
};

// Per-stage seconds for one trainer iteration. The plan must come from
// PlanPlacement for the same model and platform.
StageTimes ComputeStageTimes(const ModelConfig& model,
                             const PlatformSpec& platform,
                             const PlacementPlan& plan,
                             const CalibrationCoefficients& coeffs,
                             const TrainerEnvironment& env = {});

// Serial sum minus the overlap credit, never below the largest stage.
double IterationTime(const StageTimes& stages,
                     const CalibrationCoefficients& coeffs);

// Busy fraction of each resource over the iteration, in [0, 1].
Utilization ComputeUtilization(const StageTimes& stages, double iteration_time,
                               const PlatformSpec& platform,
                               const PlacementPlan& plan);

// Samples/s per power unit, chosen so that efficiency * power == throughput
// in floating point. May adjust `throughput` by less than one ulp to get
// there.
double PowerEfficiency(double& throughput, double power_units);

// Power drawn by one trainer plus any remote servers its plan uses.
std::optional<double> TrainerPower(const PlatformSpec& platform,
                                   const PlacementPlan& plan,
                                   const TrainerEnvironment& env);

// Full evaluation: stages, iteration time, throughput, power, utilization.
CostBreakdown Evaluate(const ModelConfig& model, const PlatformSpec& platform,
                       const PlacementPlan& plan,
                       const CalibrationCoefficients& coeffs,
                       const TrainerEnvironment& env = {});

// Plans with PlanPlacement and evaluates. Throws InfeasibleError.
CostBreakdown Simulate(const ModelConfig& model, const PlatformSpec& platform,
                       const PlacementStrategy& strategy,
                       const CalibrationCoefficients& coeffs,
                       const TrainerEnvironment& env = {});

}  // namespace recshard

#endif  // RECSHARD_COST_MODEL_H_
