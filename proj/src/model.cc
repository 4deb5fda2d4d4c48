// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#include "recshard/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recshard/error.h"

namespace recshard {
namespace {

uint64_t CheckedMul(uint64_t a, uint64_t b, const char* what) {
  uint64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError(std::string(what) + " overflows 64 bits");
  }
  return out;
}

uint64_t CheckedAdd(uint64_t a, uint64_t b, const char* what) {
  uint64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError(std::string(what) + " overflows 64 bits");
  }
  return out;
}

void ValidateStack(const MlpStack& stack, const char* name) {
  if (stack.layer_widths.empty()) {
    throw ConfigError(std::string(name) + " has no layers");
  }
  if (stack.input_dim < 0) {
    throw ConfigError(std::string(name) + " has a negative input dim");
  }
  for (int64_t w : stack.layer_widths) {
    if (w < 1) throw ConfigError(std::string(name) + " has a zero-width layer");
  }
}

// Sum over layers of w[l-1] * w[l] (+ w[l] when counting biases).
uint64_t StackProducts(const MlpStack& stack, bool with_bias) {
  uint64_t total = 0;
  uint64_t prev = static_cast<uint64_t>(stack.input_dim);
  for (int64_t w : stack.layer_widths) {
    const uint64_t width = static_cast<uint64_t>(w);
    const uint64_t fan_in = with_bias ? prev + 1 : prev;
    total = CheckedAdd(total, CheckedMul(fan_in, width, "mlp size"), "mlp size");
    prev = width;
  }
  return total;
}

}  // namespace

void SparseFeatureSpec::Validate() const {
  if (hash_size < 1) throw ConfigError("hash_size must be >= 1");
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (!(mean_pooling > 0) || !std::isfinite(mean_pooling)) {
    throw ConfigError("mean_pooling must be a positive finite number");
  }
  if (truncation < 1) throw ConfigError("truncation must be >= 1");
  if (bytes_per_element != 1 && bytes_per_element != 2 &&
      bytes_per_element != 4 && bytes_per_element != 8) {
    throw ConfigError("bytes_per_element must be 1, 2, 4 or 8");
  }
}

int64_t MlpStack::output_dim() const {
  return layer_widths.empty() ? input_dim : layer_widths.back();
}

void RederiveInputDims(ModelConfig& model) {
  model.bottom_mlp.input_dim = model.dense_count;
  model.top_mlp.input_dim = InteractionOutputDim(model);
}

ModelConfig MakeModel(int64_t dense_count,
                      std::vector<SparseFeatureSpec> sparse,
                      std::vector<int64_t> bottom_widths,
                      std::vector<int64_t> top_widths, Interaction interaction,
                      int64_t batch_size) {
  ModelConfig model;
  model.dense_count = dense_count;
  model.sparse = std::move(sparse);
  model.bottom_mlp.layer_widths = std::move(bottom_widths);
  model.top_mlp.layer_widths = std::move(top_widths);
  model.interaction = interaction;
  model.batch_size = batch_size;
  ValidateStack(model.bottom_mlp, "bottom_mlp");
  RederiveInputDims(model);
  ValidateModel(model);
  return model;
}

void ValidateModel(const ModelConfig& model) {
  if (model.dense_count < 0) throw ConfigError("dense_count must be >= 0");
  if (model.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  for (const auto& spec : model.sparse) spec.Validate();
  ValidateStack(model.bottom_mlp, "bottom_mlp");
  ValidateStack(model.top_mlp, "top_mlp");
  if (model.interaction.kind == InteractionKind::kDotPairwise &&
      model.interaction.projection_dim < 1) {
    throw ConfigError("projection_dim must be >= 1 for dot interaction");
  }
  if (model.bottom_mlp.input_dim != model.dense_count) {
    throw ConfigError("bottom_mlp input dim must equal dense_count");
  }
  if (model.top_mlp.input_dim != InteractionOutputDim(model)) {
    throw ConfigError("top_mlp input dim must equal the interaction output");
  }
}

uint64_t TableSizeBytes(const SparseFeatureSpec& spec) {
  return CheckedMul(CheckedMul(spec.hash_size, spec.embedding_dim, "table size"),
                    spec.bytes_per_element, "table size");
}

uint64_t LookupsPerIteration(const SparseFeatureSpec& spec, int64_t batch) {
  const double per_sample =
      std::min(spec.mean_pooling, static_cast<double>(spec.truncation));
  const double exact = static_cast<double>(batch) * per_sample;
  if (!(exact < 1.8e19)) throw OverflowError("lookup count overflows 64 bits");
  const auto rounded = static_cast<uint64_t>(std::floor(exact + 0.5));
  return std::max(rounded, static_cast<uint64_t>(batch));
}

uint64_t LookupBytesPerIteration(const SparseFeatureSpec& spec, int64_t batch) {
  return CheckedMul(LookupsPerIteration(spec, batch),
                    uint64_t{spec.embedding_dim} * spec.bytes_per_element,
                    "lookup bytes");
}

uint64_t MlpFlops(const MlpStack& stack, int64_t batch) {
  const uint64_t macs = StackProducts(stack, /*with_bias=*/false);
  return CheckedMul(CheckedMul(2, static_cast<uint64_t>(batch), "mlp flops"),
                    macs, "mlp flops");
}

uint64_t InteractionPairCount(size_t num_sparse) {
  return (uint64_t{num_sparse} + 1) * num_sparse / 2;
}

namespace {

// The embedding width shared by all tables in a dot interaction.
uint64_t DotWidth(const ModelConfig& model) {
  const uint32_t width = model.interaction.projection_dim;
  for (const auto& spec : model.sparse) {
    if (spec.embedding_dim != width) {
      throw ConfigError(
          "dot interaction needs every embedding_dim equal to projection_dim");
    }
  }
  return width;
}

}  // namespace

int64_t InteractionOutputDim(const ModelConfig& model) {
  const int64_t bottom_out = model.bottom_mlp.output_dim();
  if (model.interaction.kind == InteractionKind::kConcat) {
    int64_t dim = bottom_out;
    for (const auto& spec : model.sparse) dim += spec.embedding_dim;
    return dim;
  }
  DotWidth(model);
  return bottom_out +
         static_cast<int64_t>(InteractionPairCount(model.sparse.size()));
}

InteractionCost InteractionFlops(const ModelConfig& model) {
  if (model.interaction.kind == InteractionKind::kConcat) return {};
  const uint64_t width = DotWidth(model);
  const uint64_t pairs = InteractionPairCount(model.sparse.size());
  const auto bottom_out = static_cast<uint64_t>(model.bottom_mlp.output_dim());
  return InteractionCost{
      .pair_flops = 2 * width * pairs,
      .projection_flops = 2 * bottom_out * width,
  };
}

uint64_t DenseParamCount(const ModelConfig& model) {
  return CheckedAdd(StackProducts(model.bottom_mlp, /*with_bias=*/true),
                    StackProducts(model.top_mlp, /*with_bias=*/true),
                    "dense params");
}

uint64_t TotalEmbeddingBytes(const ModelConfig& model) {
  uint64_t total = 0;
  for (const auto& spec : model.sparse) {
    total = CheckedAdd(total, TableSizeBytes(spec), "embedding bytes");
  }
  return total;
}

// ---------------------------------------------------------------------------
// Synthetic populations

void SynthPopulationParams::Validate() const {
  if (num_sparse.min < 0 || num_sparse.min > num_sparse.max) {
    throw ConfigError("num_sparse range is empty");
  }
  if (num_dense.min < 0 || num_dense.min > num_dense.max) {
    throw ConfigError("num_dense range is empty");
  }
  if (!(pooling_exponent > 1)) {
    throw ConfigError("pooling exponent must be > 1");
  }
  if (!(pooling.min > 0) || pooling.min > pooling.max) {
    throw ConfigError("pooling range must be positive and non-empty");
  }
  if (!(hash_size.min >= 1) || hash_size.min > hash_size.max) {
    throw ConfigError("hash_size range must be >= 1 and non-empty");
  }
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (truncation < 1) throw ConfigError("truncation must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

double UnitUniform(SynthRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double DrawBoundedPowerLaw(SynthRng& rng, double exponent, double lo,
                           double hi) {
  const double u = UnitUniform(rng);
  if (lo == hi) return lo;
  const double e = 1.0 - exponent;
  if (std::fabs(e) < 1e-9) {
    // Density 1/x: the inverse CDF is log-uniform.
    return std::clamp(lo * std::pow(hi / lo, u), lo, hi);
  }
  const double a = std::pow(lo, e);
  const double b = std::pow(hi, e);
  const double x = std::pow(a + u * (b - a), 1.0 / e);
  return std::clamp(x, lo, hi);
}

double DrawLogUniform(SynthRng& rng, double lo, double hi) {
  const double u = UnitUniform(rng);
  if (lo == hi) return lo;
  const double x = std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  return std::clamp(x, lo, hi);
}

int64_t DrawUniformInt(SynthRng& rng, int64_t lo, int64_t hi) {
  const double u = UnitUniform(rng);
  const auto span = static_cast<double>(hi - lo + 1);
  const auto offset = static_cast<int64_t>(std::floor(u * span));
  return std::min(lo + offset, hi);
}

ModelConfig DrawSyntheticModel(const SynthPopulationParams& params,
                               SynthRng& rng) {
  const int64_t num_sparse =
      DrawUniformInt(rng, params.num_sparse.min, params.num_sparse.max);
  const int64_t num_dense =
      DrawUniformInt(rng, params.num_dense.min, params.num_dense.max);
  std::vector<SparseFeatureSpec> sparse;
  sparse.reserve(static_cast<size_t>(num_sparse));
  for (int64_t i = 0; i < num_sparse; ++i) {
    SparseFeatureSpec spec;
    spec.embedding_dim = params.embedding_dim;
    spec.truncation = params.truncation;
    spec.mean_pooling = DrawBoundedPowerLaw(rng, params.pooling_exponent,
                                            params.pooling.min,
                                            params.pooling.max);
    spec.hash_size = static_cast<uint64_t>(std::llround(
        DrawLogUniform(rng, params.hash_size.min, params.hash_size.max)));
    sparse.push_back(spec);
  }
  Interaction interaction{params.interaction, params.embedding_dim};
  return MakeModel(num_dense, std::move(sparse), params.bottom_widths,
                   params.top_widths, interaction, params.batch_size);
}

ModelConfig GenerateSyntheticModel(const SynthPopulationParams& params) {
  params.Validate();
  SynthRng rng(params.seed);
  return DrawSyntheticModel(params, rng);
}

}  // namespace recshard
