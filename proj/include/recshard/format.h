// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_FORMAT_H_
#define RECSHARD_FORMAT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recshard/cost_model.h"

namespace recshard {

// Shortest text that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string FormatDouble(double value);

// Empty string for nullopt.
std::string FormatOptional(const std::optional<double>& value);

// Quotes the field when it holds a comma, quote or newline.
std::string CsvField(std::string_view field);

std::string CsvLine(const std::vector<std::string>& fields);

// scenario_id, stage columns in Stage order, iteration_s, throughput,
// power_eff, util_cpu, util_host_bw, util_gpu_bw, util_nic.
std::vector<std::string> CostCsvColumns();

// The stage..util_nic part of a row; pairs with CostCsvColumns()[1..].
std::vector<std::string> CostCsvValues(const CostBreakdown& breakdown);

}  // namespace recshard

#endif  // RECSHARD_FORMAT_H_
