// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "enerv/data.hpp"
#include "enerv/model.hpp"
#include "enerv/nn.hpp"

namespace enerv {

struct TrainPlan {
  int epochs = 300;
  int batch_size = 1;
  double max_lr = 5e-4;
  double warmup_frac = 0.2;
  double alpha = 0.7;  // weight of L1; SSIM gets 1 - alpha
  uint64_t seed = 0;
  int log_every = 1;         // epochs between progress lines (0 silences)
  int checkpoint_every = 0;  // epochs between checkpoints (0 keeps only the final one)
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;  // throws ConfigError
  bool operator==(const TrainPlan&) const = default;
};

/// alpha * mean|pred - gt| + (1 - alpha) * (1 - SSIM(pred, gt)). When grad is
/// non-null it receives d loss / d pred.
template <typename T>
double frame_loss(const Tensor<T>& pred, const Tensor<T>& gt, double alpha, Tensor<T>* grad = nullptr);

/// Linear warmup over ceil(warmup_frac * total) steps, then cosine decay to 0.
double lr_at(int64_t iter, int64_t total_iters, const TrainPlan& plan);
int64_t warmup_iters(int64_t total_iters, const TrainPlan& plan);

/// Per-parameter binary masks (1 keeps, 0 prunes); empty tensors mean unmasked.
using ParamMasks = std::vector<Tensor<uint8_t>>;
void apply_masks(nn::ParamStore<float>& params, const ParamMasks& masks);

/// Adam with PyTorch's bias-correction arrangement.
class Adam {
 public:
  Adam() = default;
  Adam(const nn::ParamStore<float>& params, double beta1, double beta2, double eps);

  void step(nn::ParamStore<float>& params, double lr);
  int64_t steps() const { return step_; }

  // Exposed for checkpoints.
  std::vector<Tensor<float>>& first_moment() { return m_; }
  std::vector<Tensor<float>>& second_moment() { return v_; }
  const std::vector<Tensor<float>>& first_moment() const { return m_; }
  const std::vector<Tensor<float>>& second_moment() const { return v_; }
  void set_steps(int64_t s) { step_ = s; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double eps() const { return eps_; }

 private:
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t step_ = 0;
  std::vector<Tensor<float>> m_, v_;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0;       // mean training loss over the epoch's steps
  double psnr_seen = 0;  // mean PSNR of the frames as predicted during the epoch
  double seconds = 0;
  double lr = 0;  // learning rate of the epoch's last step
};

struct FitLog {
  std::vector<EpochRecord> epochs;
  std::vector<double> lr_trace;    // one entry per optimizer step
  std::vector<double> step_losses;  // one entry per optimizer step

  std::string csv() const;
};

/// Everything needed to continue a fit exactly where it stopped.
struct TrainerState {
  Adam optimizer;
  int64_t step = 0;  // optimizer steps taken
  int epoch = 0;     // completed epochs
  ParamMasks masks;
  FitLog log;
};

struct FitOptions {
  std::filesystem::path checkpoint_dir;  // empty disables checkpoints
  std::function<void(const EpochRecord&)> on_epoch;
  /// When set, training continues from this state (optimizer, schedule
  /// position, masks) and the returned state is written back into it.
  TrainerState* state = nullptr;
  /// LR multiplier over the whole schedule, used by pruning fine-tunes.
  double lr_scale = 1.0;
};

/// Epoch e's visiting order: a seeded permutation of `frames`.
std::vector<int64_t> epoch_order(const std::vector<int64_t>& frames, uint64_t seed, int epoch);

/// Fits the model to the dataset's training frames (the seen split when one exists).
FitLog fit(VideoINR<float>& model, const FrameDataset& ds, const TrainPlan& plan, const FitOptions& options = {});

}  // namespace enerv
