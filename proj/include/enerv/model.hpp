// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enerv/encoding.hpp"
#include "enerv/nn.hpp"
#include "enerv/tensor.hpp"

namespace enerv {

enum class Variant {
  kNervBaseline,     // gamma(t) -> MLP -> reshape -> blocks
  kEnerv,            // disentangled spatial/temporal context, attention fusion
  kNervCs,           // baseline with a narrow C_S map and a 1x1 conv up to C
  kNervSplit,        // baseline emitting C x (h + w), expanded by per-channel outer product
  kEnervMlpFusion,   // E-NeRV with token-mixing + channel-mixing MLPs as the fusion network
  kEnervConvFusion,  // E-NeRV with a 3x3 convolution block as the fusion network
};

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);  // throws ConfigError
bool is_disentangled(Variant v);

struct BlockSpec {
  int c_in = 0;
  int c_out = 0;
  int stride = 1;
  bool upgraded = false;
  int c_mid = 0;  // upgraded only

  static int mid_channels(int c_in, int c_out);  // max(1, floor(min/4))
  void validate() const;
};

struct ModelConfig {
  Variant variant = Variant::kEnerv;
  int base_h = 9;
  int base_w = 16;
  std::vector<int> strides{5, 2, 2, 2, 2};
  // One entry per block boundary: block i maps block_channels[i] -> block_channels[i+1].
  std::vector<int> block_channels;
  int fusion_dim = 256;   // d
  int spatial_dim = 256;  // d_t
  int in_dim = 128;       // d0, temporal feature for instance normalization
  int heads_fusion = 8;
  int mlp_dim_phi = 128;  // feed-forward width inside both transformer blocks
  FreqEncodingSpec temporal_spec{1.25, 80};
  FreqEncodingSpec spatial_spec{1.25, 40};
  FreqEncodingSpec in_spec{1.25, 80};
  bool use_phi = true;
  bool use_fusion = true;
  bool use_temporal_in = true;
  bool upgraded_first_block = true;
  bool upgraded_all_blocks = false;
  std::optional<int> cs_dim;
  // Hidden widths of the temporal MLP (F for E-NeRV, the whole stem for the
  // coupled variants) and of the small MLP feeding instance normalization.
  std::vector<int> temporal_hidden{512, 512};
  std::vector<int> in_hidden{512};
  // Expected frame size; 0 leaves it unchecked. validate() rejects a stride
  // product that does not reproduce it.
  int target_h = 0;
  int target_w = 0;

  int out_h() const;
  int out_w() const;
  int stride_product() const;
  std::vector<BlockSpec> block_specs() const;
  void validate() const;  // throws ConfigError
  bool operator==(const ModelConfig&) const = default;
};

/// Model for one video. Parameters live in a single ParamStore; the layer
/// structs reference them by index so the whole model copies by value.
template <typename T>
class VideoINR {
 public:
  struct BlockCtx {
    nn::InstanceNormCtx<T> norm;
    typename nn::Conv2d<T>::Ctx conv1;
    typename nn::Conv2d<T>::Ctx conv2;
    Tensor<T> pre_act;
  };
  /// Record of the t-independent spatial branch, shared by every frame of a batch.
  struct SpatialTape {
    Tensor<T> embedded;  // N x d_t after the grid embedding
    typename nn::TransformerBlock<T>::Ctx phi;
    Tensor<T> context;   // S, N x d_t
    Tensor<T> fused_in;  // S projected to d, N x d
    Tensor<T> d_fused_in;
  };
  /// Record of one frame's forward pass.
  struct FrameTape {
    double t = 0;
    typename nn::Mlp<T>::Ctx stem;
    Tensor<T> stem_out;
    typename nn::Conv2d<T>::Ctx cs_conv;
    Tensor<T> temporal;  // 1 x d
    Tensor<T> product;   // N x d, S (.) temporal
    typename nn::TransformerBlock<T>::Ctx fusion_attn;
    typename nn::Mlp<T>::Ctx mix_tokens, mix_channels;
    Tensor<T> mixed_mid;
    typename nn::Conv2d<T>::Ctx fconv1, fconv2;
    Tensor<T> fconv_pre;
    Tensor<T> fusion_out;  // N x d
    typename nn::Mlp<T>::Ctx in_mlp;
    Tensor<T> in_feature;  // l_t, 1 x d0
    std::vector<Tensor<T>> block_in;
    std::vector<BlockCtx> blocks;
    typename nn::Conv2d<T>::Ctx head;
    Tensor<T> frame;  // sigmoid output
  };

  static VideoINR build(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  uint64_t seed() const { return seed_; }
  nn::ParamStore<T>& params() { return params_; }
  const nn::ParamStore<T>& params() const { return params_; }

  // ---- component evaluations ----
  /// S = Phi(embed(encoded grid)) as d_t x h x w. Disentangled variants only.
  Tensor<T> spatial_context() const;
  /// F(gamma(t)), length d. Disentangled variants only.
  Tensor<T> temporal_vector(double t) const;
  /// Broadcast product with S (d_t x h x w), the fusion network, then the
  /// channel projection: returns C0 x h x w.
  Tensor<T> fuse(const Tensor<T>& temporal_vec, const Tensor<T>& spatial) const;
  /// Temporal instance normalization at the start of block `block`.
  Tensor<T> temporal_in(int block, const Tensor<T>& f, double t) const;
  /// (scale, shift) that M_block produces for t; scale already includes the +1.
  std::pair<std::vector<T>, std::vector<T>> in_statistics(int block, double t) const;
  /// One NeRV block without its instance normalization.
  Tensor<T> block_forward(int block, const Tensor<T>& f) const;
  /// Whole frame 3 x H x W in (0,1). Pure function of (parameters, t).
  Tensor<T> forward(double t) const;

  // ---- training ----
  void spatial_forward(SpatialTape& tape) const;
  Tensor<T> frame_forward(const SpatialTape& spatial, double t, FrameTape& tape) const;
  /// Accumulates parameter gradients and the spatial-context gradient.
  void frame_backward(SpatialTape& spatial, FrameTape& tape, const Tensor<T>& d_frame);
  void spatial_backward(SpatialTape& tape);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int64_t num_tokens() const { return static_cast<int64_t>(config_.base_h) * config_.base_w; }

 private:
  struct Block {
    BlockSpec spec;
    nn::Conv2d<T> conv1;
    std::optional<nn::Conv2d<T>> conv2;
    std::optional<nn::Linear<T>> in_map;
  };

  Tensor<T> run_block(int i, const Tensor<T>& f, const Tensor<T>* in_feature, BlockCtx& ctx) const;
  Tensor<T> block_backward(int i, BlockCtx& ctx, const Tensor<T>& dy, const Tensor<T>* in_feature,
                           Tensor<T>* d_in_feature);
  Tensor<T> front_forward(const SpatialTape& spatial, double t, FrameTape& tape) const;
  void front_backward(SpatialTape& spatial, FrameTape& tape, const Tensor<T>& df);
  Tensor<T> fusion_forward(const Tensor<T>& z, FrameTape& tape) const;
  Tensor<T> fusion_backward(FrameTape& tape, const Tensor<T>& dy);

  ModelConfig config_;
  uint64_t seed_ = 0;
  nn::ParamStore<T> params_;
  Tensor<T> grid_tokens_;  // N x 4*levels encoded grid, constant

  // coupled variants
  nn::Mlp<T> stem_;
  std::optional<nn::Conv2d<T>> cs_conv_;
  // disentangled variants
  std::optional<nn::Linear<T>> spatial_embed_;
  std::optional<nn::TransformerBlock<T>> phi_;
  std::optional<nn::Linear<T>> spatial_proj_;
  std::optional<nn::TransformerBlock<T>> fusion_attn_;
  std::optional<nn::Mlp<T>> mix_tokens_, mix_channels_;
  std::optional<nn::Conv2d<T>> fusion_conv1_, fusion_conv2_;
  std::optional<nn::Linear<T>> fuse_proj_;
  // instance-normalization branch
  std::optional<nn::Mlp<T>> in_mlp_;

  std::vector<Block> blocks_;
  nn::Conv2d<T> head_;
};

/// Instance-normalization stabilizer added to the spatial variance.
inline constexpr double kInstanceNormEps = 1e-5;

}  // namespace enerv
