// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_JSON_IO_H_
#define RECSHARD_JSON_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "recshard/cluster.h"
#include "recshard/cost_model.h"
#include "recshard/hardware.h"
#include "recshard/model.h"
#include "recshard/placement.h"
#include "recshard/scenario.h"
#include "recshard/sweep.h"

// JSON schemas for every document the tools read or write. Readers are
// strict: unknown keys, wrong types and non-integral integers are
// ConfigErrors naming the offending path.
namespace recshard {

using Json = nlohmann::ordered_json;

Json ParseJson(std::string_view text, std::string_view source);
Json ReadJsonFile(const std::filesystem::path& path);
// Two-space indented with a trailing newline.
std::string DumpJson(const Json& j);

// {dense_count, sparse:[{hash_size, dim, pooling, truncation,
// bytes_per_element}], bottom_mlp:[...], top_mlp:[...],
// interaction:{kind, projection_dim}, batch_size}. Also accepted:
// {"preset": "M1", "batch_size": 200} and {"synthetic": {...}} (population
// parameters; its seed defaults to `seed`).
ModelConfig ModelFromJson(const Json& j, uint64_t seed = 0);
Json ModelToJson(const ModelConfig& model);

SynthPopulationParams PopulationFromJson(const Json& j, uint64_t seed = 0);

// A preset name, {"preset": name, <field overrides>}, or the full object.
PlatformSpec PlatformFromJson(const Json& j);
Json PlatformToJson(const PlatformSpec& platform);

// A label such as "remote_ps/8" or {"kind": "remote_ps", "num_servers": 8}.
PlacementStrategy StrategyFromJson(const Json& j);
Json StrategyToJson(const PlacementStrategy& strategy);

// {trainers, dense_ps, sparse_ps, readers, sync:{method, period, hogwild,
// sigma}}.
ClusterTopology TopologyFromJson(const Json& j);
Json TopologyToJson(const ClusterTopology& topo);

// Missing keys keep their value from `base`.
CalibrationCoefficients CoefficientsFromJson(
    const Json& j, const CalibrationCoefficients& base = DefaultCoefficients());
Json CoefficientsToJson(const CalibrationCoefficients& coeffs);

// {reader_bandwidth, ps_platform, hogwild_threads, sync_period}.
TrainerEnvironment EnvironmentFromJson(const Json& j);

// {id, model, platform, strategy, topology?, environment?, coefficients?}.
Scenario ScenarioFromJson(const Json& j, uint64_t seed = 0);

// {base: scenario, axes: [{param, values}], seed?, output?}.
SweepSpec SweepSpecFromJson(const Json& j);

// {references: [{name, target, baseline, measured_ratio}]}.
std::vector<CalibrationReference> ReferencesFromJson(const Json& j);
// {compute_efficiency: [...], overlap: [...], per_op_overhead_scale: [...],
// host_processing_cost: [...], base?: coefficients}.
CalibrationGrid GridFromJson(const Json& j);

Json CostBreakdownToJson(const CostBreakdown& breakdown);
Json PlanToJson(const PlacementPlan& plan);

// [{id, size, load}] or {"tables": [...]}.
std::vector<TableLoad> TableLoadsFromJson(const Json& j);
// [{id, capacity}] or {"devices": [...]}.
std::vector<ShardDevice> ShardDevicesFromJson(const Json& j);
Json AssignmentToJson(const std::vector<TableLoad>& tables,
                      const std::vector<ShardDevice>& devices,
                      const ShardAssignment& assignment,
                      std::string_view strategy);

}  // namespace recshard

#endif  // RECSHARD_JSON_IO_H_
