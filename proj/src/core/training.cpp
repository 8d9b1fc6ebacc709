// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "enerv/checkpoint.hpp"
#include "enerv/errors.hpp"
#include "enerv/kernels.hpp"
#include "enerv/metrics.hpp"

namespace enerv {

void TrainPlan::validate() const {
  if (epochs < 1) throw ConfigError("plan.epochs must be >= 1, got " + std::to_string(epochs));
  if (batch_size < 1) throw ConfigError("plan.batch_size must be >= 1");
  if (!(max_lr > 0) || !std::isfinite(max_lr)) throw ConfigError("plan.max_lr must be positive");
  if (!(warmup_frac > 0 && warmup_frac < 1)) throw ConfigError("plan.warmup_frac must lie in (0,1)");
  if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("plan.alpha must lie in [0,1]");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw ConfigError("plan.beta1/beta2 must lie in [0,1)");
  if (!(adam_eps > 0)) throw ConfigError("plan.adam_eps must be positive");
  if (log_every < 0 || checkpoint_every < 0) throw ConfigError("plan.log_every/checkpoint_every must be >= 0");
}

template <typename T>
double frame_loss(const Tensor<T>& pred, const Tensor<T>& gt, double alpha, Tensor<T>* grad) {
  if (pred.shape() != gt.shape()) {
    throw std::invalid_argument("loss: prediction " + shape_to_string(pred.shape()) + " vs target " +
                                shape_to_string(gt.shape()));
  }
  const int64_t n = pred.size();
  double l1 = 0;
  for (int64_t i = 0; i < n; ++i) l1 += std::fabs(static_cast<double>(pred[i]) - static_cast<double>(gt[i]));
  l1 /= static_cast<double>(n);
  double s = 1.0;
  Tensor<T> ds;
  if (alpha < 1.0) s = ssim(pred, gt, grad ? &ds : nullptr);
  if (grad) {
    *grad = Tensor<T>(pred.shape());
    const T l1_scale = static_cast<T>(alpha / static_cast<double>(n));
    const T s_scale = static_cast<T>(-(1.0 - alpha));
    for (int64_t i = 0; i < n; ++i) {
      const T d = pred[i] - gt[i];
      T g = d > T(0) ? l1_scale : (d < T(0) ? -l1_scale : T(0));
      if (alpha < 1.0) g += s_scale * ds[i];
      (*grad)[i] = g;
    }
  }
  return alpha * l1 + (1.0 - alpha) * (1.0 - s);
}

template double frame_loss<float>(const Tensor<float>&, const Tensor<float>&, double, Tensor<float>*);
template double frame_loss<double>(const Tensor<double>&, const Tensor<double>&, double, Tensor<double>*);

int64_t warmup_iters(int64_t total_iters, const TrainPlan& plan) {
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(plan.warmup_frac * static_cast<double>(total_iters))));
}

double lr_at(int64_t iter, int64_t total_iters, const TrainPlan& plan) {
  if (total_iters < 1 || iter < 0 || iter >= total_iters) {
    throw ConfigError("lr_at: iteration " + std::to_string(iter) + " outside [0, " + std::to_string(total_iters) + ")");
  }
  const int64_t warm = warmup_iters(total_iters, plan);
  if (iter < warm) return plan.max_lr * static_cast<double>(iter + 1) / static_cast<double>(warm);
  if (total_iters == warm) return plan.max_lr;
  const double progress = static_cast<double>(iter - warm + 1) / static_cast<double>(total_iters - warm);
  return plan.max_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

void apply_masks(nn::ParamStore<float>& params, const ParamMasks& masks) {
  if (masks.empty()) return;
  if (masks.size() != params.size()) throw std::logic_error("mask count does not match parameter count");
  for (size_t i = 0; i < params.size(); ++i) {
    if (masks[i].empty()) continue;
    auto& p = params[i];
    for (int64_t j = 0; j < p.value.size(); ++j) {
      if (!masks[i][j]) {
        p.value[j] = 0.0f;
        p.grad[j] = 0.0f;
      }
    }
  }
}

Adam::Adam(const nn::ParamStore<float>& params, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params.all()) {
    m_.emplace_back(p.value.shape());
    v_.emplace_back(p.value.shape());
  }
}

void Adam::step(nn::ParamStore<float>& params, double lr) {
  if (m_.size() != params.size()) throw std::logic_error("optimizer state does not match the model");
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  const kernels::AdamCoeffs c{static_cast<float>(lr / bc1), static_cast<float>(beta1_), static_cast<float>(beta2_),
                              static_cast<float>(eps_), static_cast<float>(1.0 / std::sqrt(bc2))};
  const auto& k = kernels::active();
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    k.adam_step(p.value.size(), p.value.data(), p.grad.data(), m_[i].data(), v_[i].data(), c);
  }
}

std::string FitLog::csv() const {
  std::ostringstream os;
  os << "epoch,loss,psnr_seen,seconds,lr\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.6f,%.4f,%.9g\n", e.epoch, e.loss, e.psnr_seen, e.seconds, e.lr);
    os << buf;
  }
  return os.str();
}

std::vector<int64_t> epoch_order(const std::vector<int64_t>& frames, uint64_t seed, int epoch) {
  std::vector<int64_t> order = frames;
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(epoch + 1)));
  for (size_t i = order.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

FitLog fit(VideoINR<float>& model, const FrameDataset& ds, const TrainPlan& plan, const FitOptions& options) {
  plan.validate();
  ds.validate();
  if (model.config().out_h() != ds.height() || model.config().out_w() != ds.width()) {
    throw DataError("model renders " + std::to_string(model.config().out_h()) + "x" +
                    std::to_string(model.config().out_w()) + " frames but the video is " +
                    std::to_string(ds.height()) + "x" + std::to_string(ds.width()));
  }
  const std::vector<int64_t> frames = ds.training_frames();
  if (frames.empty()) throw DataError("no training frames");

  TrainerState local;
  TrainerState& st = options.state ? *options.state : local;
  auto& params = model.params();
  if (st.optimizer.first_moment().empty()) st.optimizer = Adam(params, plan.beta1, plan.beta2, plan.adam_eps);
  if (!st.masks.empty()) apply_masks(params, st.masks);

  const int64_t per_epoch = (static_cast<int64_t>(frames.size()) + plan.batch_size - 1) / plan.batch_size;
  const int64_t total = per_epoch * plan.epochs;
  if (st.step != static_cast<int64_t>(st.epoch) * per_epoch) {
    throw ConfigError("trainer state is not at an epoch boundary of this plan");
  }
  const int64_t n_pix = 3 * ds.height() * ds.width();

  typename VideoINR<float>::SpatialTape spatial;
  typename VideoINR<float>::FrameTape tape;
  Tensor<float> grad;
  for (int epoch = st.epoch; epoch < plan.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int64_t> order = epoch_order(frames, plan.seed, epoch);
    double loss_sum = 0, psnr_sum = 0, lr = 0;
    for (int64_t b = 0; b < per_epoch; ++b) {
      lr = lr_at(st.step, total, plan) * options.lr_scale;
      params.zero_grad();
      model.spatial_forward(spatial);
      const int64_t first = b * plan.batch_size;
      const int64_t last = std::min<int64_t>(first + plan.batch_size, static_cast<int64_t>(order.size()));
      double batch_loss = 0;
      for (int64_t i = first; i < last; ++i) {
        const int64_t k = order[i];
        const Tensor<float> pred = model.frame_forward(spatial, ds.indices[k], tape);
        const Tensor<float> gt = ds.frame(k);
        const double l = frame_loss(pred, gt, plan.alpha, &grad);
        if (!std::isfinite(l)) {
          throw NumericalError("non-finite loss at step " + std::to_string(st.step) + " (epoch " +
                               std::to_string(epoch) + ", frame " + std::to_string(k) + ")");
        }
        const float scale = 1.0f / static_cast<float>(last - first);
        for (auto& g : grad.span()) g *= scale;
        model.frame_backward(spatial, tape, grad);
        batch_loss += l;
        psnr_sum += std::min(psnr(pred.data(), gt.data(), n_pix), kPsnrCap);
      }
      model.spatial_backward(spatial);
      if (!st.masks.empty()) apply_masks(params, st.masks);
      st.optimizer.step(params, lr);
      if (!st.masks.empty()) apply_masks(params, st.masks);
      batch_loss /= static_cast<double>(last - first);
      st.log.lr_trace.push_back(lr);
      st.log.step_losses.push_back(batch_loss);
      loss_sum += batch_loss;
      ++st.step;
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.loss = loss_sum / static_cast<double>(per_epoch);
    rec.psnr_seen = psnr_sum / static_cast<double>(frames.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.lr = lr;
    st.log.epochs.push_back(rec);
    st.epoch = epoch + 1;
    if (!options.checkpoint_dir.empty()) {
      const bool periodic = plan.checkpoint_every > 0 && st.epoch % plan.checkpoint_every == 0;
      if (periodic || st.epoch == plan.epochs) {
        std::filesystem::create_directories(options.checkpoint_dir);
        save_checkpoint(options.checkpoint_dir / "checkpoint.bin", model, &plan, &st);
      }
    }
    if (options.on_epoch) options.on_epoch(rec);
  }
  return st.log;
}

}  // namespace enerv
