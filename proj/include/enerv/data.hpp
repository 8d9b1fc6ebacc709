// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "enerv/tensor.hpp"

namespace enerv {

enum class Split : uint8_t { kSeen, kUnseen };
std::string_view split_name(Split s);

/// Frames of one video, T x 3 x H x W in [0,1], with normalized indices k/(T-1).
struct FrameDataset {
  Tensor<float> frames;
  std::vector<double> indices;
  std::string source;
  std::vector<Split> split;  // empty when no split has been applied

  int64_t num_frames() const { return frames.empty() ? 0 : frames.dim(0); }
  int64_t height() const { return frames.dim(2); }
  int64_t width() const { return frames.dim(3); }
  Tensor<float> frame(int64_t k) const;  // 3 x H x W copy
  const float* frame_data(int64_t k) const { return frames.data() + k * 3 * height() * width(); }
  bool has_split() const { return !split.empty(); }
  /// Frame positions used for training: every frame, or only the seen ones.
  std::vector<int64_t> training_frames() const;
  std::vector<int64_t> frames_in(Split s) const;
  void validate() const;  // throws DataError
};

/// Normalized index k/(T-1) for T >= 2.
std::vector<double> normalized_indices(int64_t num_frames);

/// Builds a dataset from frames that are already in memory.
FrameDataset make_dataset(Tensor<float> frames, std::string source);

struct LoadOptions {
  int resize_h = 0;  // 0 keeps the native resolution
  int resize_w = 0;
  int max_frames = 0;  // 0 loads every frame
};

/// A directory of PNG/JPEG frames (lexicographic order) or a .y4m file.
FrameDataset load_video(const std::filesystem::path& path, const LoadOptions& options = {});

/// Marks position k unseen when k mod 4 == 3. Indices are left unchanged.
FrameDataset split_seen_unseen(const FrameDataset& ds);

enum class ClipKind { kMovingSquare, kGradientPan, kComposite };
std::string_view clip_kind_name(ClipKind k);
ClipKind parse_clip_kind(std::string_view name);

/// Deterministic synthetic clips:
///  moving_square  a square translating one pixel per frame along x over a flat background;
///  gradient_pan   a smooth colour pattern panning horizontally;
///  composite      a panning textured background with several squares moving at different speeds.
FrameDataset synth_clip(ClipKind kind, int num_frames, int height, int width, uint64_t seed);

// ---- image I/O (8-bit RGB) ----
Tensor<float> read_image(const std::filesystem::path& path);  // 3 x H x W
void write_png(const std::filesystem::path& path, const Tensor<float>& frame);
void write_frames(const std::filesystem::path& dir, const Tensor<float>& frames, std::string_view prefix = "frame");
/// Bilinear resampling with pixel-centre alignment.
Tensor<float> resize_bilinear(const Tensor<float>& frame, int height, int width);

}  // namespace enerv
