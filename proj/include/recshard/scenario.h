// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_SCENARIO_H_
#define RECSHARD_SCENARIO_H_

#include <optional>
#include <string>
#include <vector>

#include "recshard/cluster.h"
#include "recshard/cost_model.h"
#include "recshard/hardware.h"
#include "recshard/model.h"
#include "recshard/placement.h"

namespace recshard {

// Everything needed for one evaluation.
struct Scenario {
  std::string id;
  ModelConfig model;
  PlatformSpec platform;
  PlacementStrategy strategy;
  // Unset means a single stand-alone trainer.
  std::optional<ClusterTopology> topology;
  TrainerEnvironment env;
  CalibrationCoefficients coeffs = DefaultCoefficients();
};

// Single-trainer breakdown, or with a topology the trainer's stages and
// utilization paired with cluster-level throughput and power. Throws
// InfeasibleError, ConfigError.
CostBreakdown EvaluateScenario(const Scenario& scenario);

// A measured throughput ratio between two scenarios.
struct CalibrationReference {
  std::string name;
  Scenario target;
  Scenario baseline;
  double measured_ratio = 1;  // target throughput / baseline throughput
};

// Candidate values per fitted coefficient. The remaining coefficients come
// from `base`.
struct CalibrationGrid {
  std::vector<double> compute_efficiency;
  std::vector<double> overlap;
  std::vector<double> per_op_overhead_scale;
  std::vector<double> host_processing_cost;
  CalibrationCoefficients base;

  size_t size() const;
};

struct CalibrationResult {
  CalibrationCoefficients coeffs;
  double residual = 0;  // sum of squared log-ratio errors
  size_t points = 0;
};

// Grid search minimizing sum((log predicted - log measured)^2). Points are
// ordered lexicographically with compute_efficiency outermost, then overlap,
// per_op_overhead_scale and host_processing_cost; the first strict minimum
// wins whatever the thread count. Throws ConfigError on an empty grid or
// reference list.
CalibrationResult Calibrate(const std::vector<CalibrationReference>& refs,
                            const CalibrationGrid& grid, int threads);

// Predicted target/baseline throughput ratio under `coeffs`.
double PredictedRatio(const CalibrationReference& ref,
                      const CalibrationCoefficients& coeffs);

}  // namespace recshard

#endif  // RECSHARD_SCENARIO_H_
