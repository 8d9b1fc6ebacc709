// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "enerv/data.hpp"
#include "enerv/model.hpp"
#include "enerv/tensor.hpp"

namespace enerv {

inline constexpr double kPsnrInf = std::numeric_limits<double>::infinity();
/// Reported in tables and used for averaging in place of an infinite PSNR.
inline constexpr double kPsnrCap = 100.0;

/// 10 log10(1 / MSE) for signals in [0,1]; +inf when the inputs are identical.
double psnr(const float* a, const float* b, int64_t n);
double psnr(const Tensor<float>& a, const Tensor<float>& b);

/// Normalized Gaussian taps.
std::vector<double> gaussian_window(int size, double sigma);

/// Window used for an H x W image: 11, or the largest odd size that fits.
int ssim_window_size(int64_t height, int64_t width);

/// Mean single-scale SSIM over channels and valid window positions of two
/// C x H x W images (11x11 Gaussian, sigma 1.5, K1 0.01, K2 0.03, range 1).
/// When grad is non-null it receives dSSIM/da.
template <typename T>
double ssim(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>* grad = nullptr);

/// Number of MS-SSIM scales that fit: largest n <= 5 with min(H,W) >= 2^(n-1) * 11.
int ms_ssim_scales(int64_t height, int64_t width);

/// Multiscale SSIM with the standard five weights, renormalized when fewer
/// scales fit. Throws ConfigError when the image is smaller than one window.
double ms_ssim(const Tensor<float>& a, const Tensor<float>& b);

struct FrameScore {
  int64_t index = 0;
  double t = 0;
  std::optional<Split> split;
  double psnr = 0;
  double ms_ssim = 0;
};

struct Aggregate {
  int64_t frames = 0;
  double psnr = 0;     // mean of per-frame PSNR, each capped at kPsnrCap
  double ms_ssim = 0;
};

struct EvalReport {
  std::vector<FrameScore> rows;
  int ms_ssim_scales = 0;
  Aggregate overall;
  std::optional<Aggregate> seen;
  std::optional<Aggregate> unseen;

  /// Rebuilds the aggregates from rows.
  void recompute();
  std::string csv() const;
  std::string table() const;
};

EvalReport make_report(std::vector<FrameScore> rows, int scales);

/// Scores a batch of predicted frames (T x 3 x H x W) against a dataset.
EvalReport score_frames(const Tensor<float>& predicted, const FrameDataset& reference);

/// Renders every frame of the dataset and scores it.
EvalReport evaluate(const VideoINR<float>& model, const FrameDataset& ds);

/// Renders frames at arbitrary indices.
Tensor<float> render(const VideoINR<float>& model, const std::vector<double>& ts);

}  // namespace enerv
