// Copyright 2026 The recshard Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RECSHARD_MODEL_H_
#define RECSHARD_MODEL_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace recshard {

// One embedding table and the sparse feature that reads it.
struct SparseFeatureSpec {
  uint64_t hash_size = 1;        // rows
  uint32_t embedding_dim = 64;   // elements per row
  double mean_pooling = 1.0;     // mean lookups per sample
  uint32_t truncation = 32;      // hard cap on lookups per sample
  uint32_t bytes_per_element = 4;

  void Validate() const;
  bool operator==(const SparseFeatureSpec&) const = default;
};

struct MlpStack {
  int64_t input_dim = 0;
  std::vector<int64_t> layer_widths;

  int64_t output_dim() const;
  size_t num_layers() const { return layer_widths.size(); }
  bool operator==(const MlpStack&) const = default;
};

enum class InteractionKind { kConcat, kDotPairwise };

struct Interaction {
  InteractionKind kind = InteractionKind::kDotPairwise;
  // Width of the dense projection that joins the pairwise products. Must match
  // the embedding dim of every table.
  uint32_t projection_dim = 64;

  bool operator==(const Interaction&) const = default;
};

struct ModelConfig {
  int64_t dense_count = 0;
  std::vector<SparseFeatureSpec> sparse;
  MlpStack bottom_mlp;
  MlpStack top_mlp;
  Interaction interaction;
  int64_t batch_size = 1;

  bool operator==(const ModelConfig&) const = default;
};

// Builds a model whose stack input dims are derived from the dense count and
// the interaction output. Throws ConfigError when the result is invalid.
ModelConfig MakeModel(int64_t dense_count,
                      std::vector<SparseFeatureSpec> sparse,
                      std::vector<int64_t> bottom_widths,
                      std::vector<int64_t> top_widths, Interaction interaction,
                      int64_t batch_size);

// Re-derives both stack input dims after the sparse list, dense count or
// bottom stack changed.
void RederiveInputDims(ModelConfig& model);

void ValidateModel(const ModelConfig& model);

// hash_size * embedding_dim * bytes_per_element. Throws OverflowError.
uint64_t TableSizeBytes(const SparseFeatureSpec& spec);

// batch * min(mean_pooling, truncation), rounded half-up, never below batch.
uint64_t LookupsPerIteration(const SparseFeatureSpec& spec, int64_t batch);

// Bytes read from a table per iteration in the forward pass.
uint64_t LookupBytesPerIteration(const SparseFeatureSpec& spec, int64_t batch);

// Forward FLOPs: 2 * batch * sum(w[l-1] * w[l]).
uint64_t MlpFlops(const MlpStack& stack, int64_t batch);

// (S + 1) * S / 2 for S sparse features and one dense projection.
uint64_t InteractionPairCount(size_t num_sparse);

int64_t InteractionOutputDim(const ModelConfig& model);

// Per-sample interaction cost. Concatenation is free.
struct InteractionCost {
  uint64_t pair_flops = 0;
  uint64_t projection_flops = 0;

  uint64_t total() const { return pair_flops + projection_flops; }
};
InteractionCost InteractionFlops(const ModelConfig& model);

// MLP weights plus biases over both stacks.
uint64_t DenseParamCount(const ModelConfig& model);

uint64_t TotalEmbeddingBytes(const ModelConfig& model);

// Synthetic model populations.

struct IntRange {
  int64_t min = 0;
  int64_t max = 0;
};

struct RealRange {
  double min = 0;
  double max = 0;
};

struct SynthPopulationParams {
  IntRange num_sparse{4, 128};
  IntRange num_dense{64, 4096};
  double pooling_exponent = 2.0;
  RealRange pooling{1.0, 32.0};
  RealRange hash_size{30.0, 2.0e7};  // rows, sampled log-uniformly
  uint32_t embedding_dim = 64;
  uint64_t seed = 0;

  // Fixed parts of every generated model.
  uint32_t truncation = 32;
  std::vector<int64_t> bottom_widths{512, 512, 512};
  std::vector<int64_t> top_widths{512, 512, 512};
  InteractionKind interaction = InteractionKind::kDotPairwise;
  int64_t batch_size = 200;

  void Validate() const;
};

using SynthRng = std::mt19937_64;

// Uniform in [0, 1) with 53 bits of resolution.
double UnitUniform(SynthRng& rng);

// Density proportional to x^-exponent on [lo, hi], by inverse CDF.
double DrawBoundedPowerLaw(SynthRng& rng, double exponent, double lo,
                           double hi);

double DrawLogUniform(SynthRng& rng, double lo, double hi);

int64_t DrawUniformInt(SynthRng& rng, int64_t lo, int64_t hi);

// Pure function of `params`: equal params give identical models.
ModelConfig GenerateSyntheticModel(const SynthPopulationParams& params);

// Draws one model from an already-seeded stream; used for populations.
ModelConfig DrawSyntheticModel(const SynthPopulationParams& params,
                               SynthRng& rng);

// Production models M1, M2, M3. Per-table hash sizes ship as preset files.
ModelConfig ProductionPreset(std::string_view name);
std::vector<std::string> ProductionPresetNames();

// How a shipped production preset was generated.
struct ProductionRecipe {
  std::string name;
  int64_t dense_count = 0;
  size_t num_sparse = 0;
  double pooling = 1;
  double mean_hash_size = 1;
  std::vector<int64_t> bottom_widths;
  std::vector<int64_t> top_widths;
  int64_t batch_size = 1;
  uint64_t seed = 0;
};
std::vector<ProductionRecipe> ProductionRecipes();

// Log-normal draws exp(sigma * z), clamped to [lo, hi] and rescaled until
// their mean is `mean`, then rounded to whole rows.
std::vector<uint64_t> DrawLogNormalHashSizes(SynthRng& rng, size_t count,
                                             double mean, double sigma,
                                             double lo, double hi);

// Regenerates a preset from its recipe; the shipped files hold the output.
ModelConfig BuildProductionModel(const ProductionRecipe& recipe);

}  // namespace recshard

#endif  // RECSHARD_MODEL_H_
