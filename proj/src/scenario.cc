// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/scenario.h"

#include <cmath>
#include <limits>

#include "recshard/error.h"
#include "recshard/parallel.h"

namespace recshard {

CostBreakdown EvaluateScenario(const Scenario& s) {
  if (!s.topology) {
    return Simulate(s.model, s.platform, s.strategy, s.coeffs, s.env);
  }
  ClusterBreakdown c = ClusterThroughput(s.model, s.platform, s.strategy,
                                         *s.topology, s.coeffs, s.env);
  CostBreakdown out = c.trainer;
  out.throughput = c.throughput;
  out.power_units = c.power_units;
  out.power_efficiency = c.power_efficiency;
  return out;
}

size_t CalibrationGrid::size() const {
  return compute_efficiency.size() * overlap.size() *
         per_op_overhead_scale.size() * host_processing_cost.size();
}

double PredictedRatio(const CalibrationReference& ref,
                      const CalibrationCoefficients& coeffs) {
  Scenario target = ref.target;
  Scenario baseline = ref.baseline;
  target.coeffs = coeffs;
  baseline.coeffs = coeffs;
  return EvaluateScenario(target).throughput /
         EvaluateScenario(baseline).throughput;
}

CalibrationResult Calibrate(const std::vector<CalibrationReference>& refs,
                            const CalibrationGrid& grid, int threads) {
  if (refs.empty()) throw ConfigError("calibration needs >= 1 reference");
  if (grid.size() == 0) throw ConfigError("calibration grid is empty");
  for (const auto& r : refs) {
    if (!(r.measured_ratio > 0) || !std::isfinite(r.measured_ratio)) {
      throw ConfigError("reference " + r.name + ": measured ratio must be > 0");
    }
  }

  const size_t n_hpc = grid.host_processing_cost.size();
  const size_t n_scale = grid.per_op_overhead_scale.size();
  const size_t n_overlap = grid.overlap.size();
  auto point = [&](size_t i) {
    CalibrationCoefficients c = grid.base;
    c.host_processing_cost = grid.host_processing_cost[i % n_hpc];
    i /= n_hpc;
    c.per_op_overhead_scale = grid.per_op_overhead_scale[i % n_scale];
    i /= n_scale;
    c.overlap = grid.overlap[i % n_overlap];
    i /= n_overlap;
    c.compute_efficiency = grid.compute_efficiency[i];
    return c;
  };

  std::vector<double> residual(grid.size());
  ParallelFor(
      grid.size(),
      [&](size_t i) {
        const CalibrationCoefficients c = point(i);
        c.Validate();
        double sum = 0;
        for (const auto& r : refs) {
          const double err =
              std::log(PredictedRatio(r, c)) - std::log(r.measured_ratio);
          sum += err * err;
        }
        residual[i] = sum;
      },
      threads);

  CalibrationResult best;
  best.residual = std::numeric_limits<double>::infinity();
  best.points = grid.size();
  for (size_t i = 0; i < residual.size(); ++i) {
    if (residual[i] < best.residual) {
      best.residual = residual[i];
      best.coeffs = point(i);
    }
  }
  if (!std::isfinite(best.residual)) {
    throw ConfigError("no grid point produced a finite residual");
  }
  return best;
}

}  // namespace recshard
