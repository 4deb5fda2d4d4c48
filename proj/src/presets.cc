// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/presets.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "recshard/embedded_presets.h"
#include "recshard/error.h"
#include "recshard/json_io.h"
#include "recshard/model.h"

namespace recshard {
namespace {

constexpr double kHashSigma = 1.0;
constexpr double kMinRows = 30;
constexpr double kMaxRows = 2e7;

}  // namespace

std::vector<std::string> EmbeddedPresetFiles() {
  std::vector<std::string> names;
  for (const auto& [name, text] : kEmbeddedPresets) names.emplace_back(name);
  return names;
}

std::string_view EmbeddedPreset(std::string_view file) {
  for (const auto& [name, text] : kEmbeddedPresets) {
    if (name == file) return text;
  }
  throw ConfigError("no embedded preset '" + std::string(file) + "'");
}

std::vector<ProductionRecipe> ProductionRecipes() {
  return {
      {"M1", 800, 30, 28, 5.7e6, {512}, {512, 512, 512}, 1600, 1},
      {"M2", 504, 13, 17, 7.3e6, {1024}, {1024, 1024, 512}, 3200, 2},
      {"M3", 809, 127, 49, 3.7e6, {512}, {512, 256, 512, 256, 512}, 800, 3},
  };
}

std::vector<uint64_t> DrawLogNormalHashSizes(SynthRng& rng, size_t count,
                                             double mean, double sigma,
                                             double lo, double hi) {
  if (count == 0) return {};
  if (!(lo <= mean && mean <= hi)) {
    throw ConfigError("hash-size mean must lie within [lo, hi]");
  }
  std::vector<double> rows(count);
  for (auto& r : rows) {
    // Box-Muller; 1 - u keeps the logarithm finite.
    const double u1 = UnitUniform(rng);
    const double u2 = UnitUniform(rng);
    const double z = std::sqrt(-2.0 * std::log(1.0 - u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    r = std::exp(sigma * z);
  }
  for (int iter = 0; iter < 200; ++iter) {
    double sum = 0;
    for (double r : rows) sum += r;
    const double factor = mean * static_cast<double>(count) / sum;
    if (std::fabs(factor - 1) < 1e-12) break;
    for (auto& r : rows) r = std::clamp(r * factor, lo, hi);
  }
  std::vector<uint64_t> out;
  out.reserve(count);
  for (double r : rows) out.push_back(static_cast<uint64_t>(std::llround(r)));
  return out;
}

ModelConfig BuildProductionModel(const ProductionRecipe& recipe) {
  SynthRng rng(recipe.seed);
  const auto rows = DrawLogNormalHashSizes(
      rng, recipe.num_sparse, recipe.mean_hash_size, kHashSigma, kMinRows,
      kMaxRows);
  std::vector<SparseFeatureSpec> sparse;
  for (uint64_t r : rows) {
    SparseFeatureSpec s;
    s.hash_size = r;
    s.embedding_dim = 64;
    s.mean_pooling = recipe.pooling;
    s.truncation = 32;
    sparse.push_back(s);
  }
  return MakeModel(recipe.dense_count, std::move(sparse), recipe.bottom_widths,
                   recipe.top_widths,
                   Interaction{InteractionKind::kDotPairwise, 64},
                   recipe.batch_size);
}

ModelConfig ProductionPreset(std::string_view name) {
  for (const auto& recipe : ProductionRecipes()) {
    if (recipe.name != name) continue;
    std::string file(name);
    for (char& c : file) c = static_cast<char>(std::tolower(c));
    return ModelFromJson(ParseJson(EmbeddedPreset(file + ".json"), file));
  }
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

std::vector<std::string> ProductionPresetNames() { return {"M1", "M2", "M3"}; }

}  // namespace recshard
