// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "enerv/data.hpp"
#include "enerv/metrics.hpp"
#include "enerv/model.hpp"
#include "enerv/training.hpp"

namespace enerv {

// ---- compression by magnitude pruning ----

enum class PruneScope { kGlobal, kPerLayer };
std::string_view prune_scope_name(PruneScope s);
PruneScope parse_prune_scope(std::string_view name);

struct PruneSpec {
  double sparsity = 0;      // fraction of eligible weights zeroed, in [0,1)
  int finetune_epochs = 0;  // fine-tune epochs at 10% of the plan's max LR
  PruneScope scope = PruneScope::kGlobal;
  bool include_biases = false;
  bool include_head = false;

  void validate() const;  // throws ConfigError
};

/// Fine-tune budget used when none is given: 20% of the original epochs.
int default_finetune_epochs(const TrainPlan& plan);

/// Whether a parameter takes part in pruning under `spec`.
bool prunable(const nn::Parameter<float>& p, const PruneSpec& spec);

/// Masks that zero the smallest-magnitude eligible weights. Global scope
/// zeroes exactly floor(N * sparsity) of the N eligible entries; per-layer
/// scope applies the fraction to every array separately.
ParamMasks magnitude_masks(const nn::ParamStore<float>& params, const PruneSpec& spec);

/// Masked-out fraction over all entries covered by `masks`.
double achieved_sparsity(const ParamMasks& masks);

struct PruneResult {
  VideoINR<float> model;
  TrainerState state;  // carries the masks
  EvalReport report;   // after fine-tuning
  double sparsity = 0;
};

/// Prunes a copy of `model`, fine-tunes the survivors on the training frames
/// of `ds`, and evaluates on every frame.
PruneResult prune(const VideoINR<float>& model, const PruneSpec& spec, const FrameDataset& ds, const TrainPlan& plan);

struct SweepRow {
  double sparsity = 0;
  double achieved = 0;
  Aggregate score;
};

std::vector<SweepRow> compression_sweep(const VideoINR<float>& model, const FrameDataset& ds, const TrainPlan& plan,
                                        const std::vector<double>& grid, int finetune_epochs,
                                        PruneScope scope = PruneScope::kGlobal);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// ---- denoising ----

enum class NoiseKind { kGaussian, kSaltPepper, kMixed };
std::string_view noise_kind_name(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kMixed;
  double gaussian_sigma = 0.05;
  double sp_fraction = 0.02;  // share of values forced to 0 or 1
  uint64_t seed = 0;

  void validate() const;
};

/// Corrupted copy of `ds`, clamped to [0,1]; deterministic in spec.seed.
FrameDataset add_noise(const FrameDataset& ds, const NoiseSpec& spec);

/// Mean per-frame PSNR (capped) between two datasets of equal shape.
double mean_psnr(const FrameDataset& a, const FrameDataset& b);

struct DenoiseResult {
  VideoINR<float> model;
  FitLog log;
  EvalReport report;  // model output against the clean frames
  double noisy_psnr = 0;
};

/// Fits a model (seeded by plan.seed) to the corrupted frames and scores it against the clean ones.
DenoiseResult denoise(const FrameDataset& clean, const NoiseSpec& spec, const ModelConfig& config,
                      const TrainPlan& plan);

// ---- interpolation ----

struct Interpolation {
  Tensor<float> frames;  // ts.size() x 3 x H x W
  EvalReport report;     // rows for the ts that coincide with a reference index
};

/// Renders arbitrary normalized indices; throws ConfigError for ts outside [0,1].
Interpolation interpolate(const VideoINR<float>& model, const std::vector<double>& ts,
                          const FrameDataset* reference = nullptr);

enum class FreqTarget { kTemporal, kSpatial, kInBranch };
std::string_view freq_target_name(FreqTarget f);
FreqTarget parse_freq_target(std::string_view name);

struct FreqRow {
  double value = 0;
  Aggregate seen;
  Aggregate unseen;
};

/// Trains one model per encoding base on the seen split (applied when `ds`
/// has none) and reports seen and unseen scores.
std::vector<FreqRow> frequency_sweep(const ModelConfig& config, const FrameDataset& ds, FreqTarget which,
                                     const std::vector<double>& values, const TrainPlan& plan);
std::string freq_csv(const std::vector<FreqRow>& rows);

}  // namespace enerv
