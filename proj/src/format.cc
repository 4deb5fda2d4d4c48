// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/format.h"

#include <array>
#include <charconv>
#include <cmath>

namespace recshard {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string FormatOptional(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string();
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += CsvField(fields[i]);
  }
  line += '\n';
  return line;
}

std::vector<std::string> CostCsvColumns() {
  std::vector<std::string> cols = {"scenario_id"};
  for (size_t i = 0; i < kNumStages; ++i) {
    cols.emplace_back(StageName(static_cast<Stage>(i)));
  }
  for (const char* c : {"iteration_s", "throughput", "power_eff", "util_cpu",
                        "util_host_bw", "util_gpu_bw", "util_nic"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::vector<std::string> CostCsvValues(const CostBreakdown& b) {
  std::vector<std::string> v;
  for (double s : b.stages.seconds) v.push_back(FormatDouble(s));
  v.push_back(FormatDouble(b.iteration_time));
  v.push_back(FormatDouble(b.throughput));
  v.push_back(FormatOptional(b.power_efficiency));
  v.push_back(FormatDouble(b.utilization.cpu));
  v.push_back(FormatDouble(b.utilization.host_bw));
  v.push_back(FormatDouble(b.utilization.gpu_bw));
  v.push_back(FormatDouble(b.utilization.nic));
  return v;
}

}  // namespace recshard
