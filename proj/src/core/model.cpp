// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "enerv/errors.hpp"

namespace enerv {

// ---------------------------------------------------------------- variants

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNervBaseline: return "nerv_baseline";
    case Variant::kEnerv: return "enerv";
    case Variant::kNervCs: return "nerv_cs";
    case Variant::kNervSplit: return "nerv_split";
    case Variant::kEnervMlpFusion: return "enerv_mlp_fusion";
    case Variant::kEnervConvFusion: return "enerv_conv_fusion";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kNervBaseline, Variant::kEnerv, Variant::kNervCs, Variant::kNervSplit,
                    Variant::kEnervMlpFusion, Variant::kEnervConvFusion}) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

bool is_disentangled(Variant v) {
  return v == Variant::kEnerv || v == Variant::kEnervMlpFusion || v == Variant::kEnervConvFusion;
}

// --------------------------------------------------------------- BlockSpec

int BlockSpec::mid_channels(int c_in, int c_out) { return std::max(1, std::min(c_in, c_out) / 4); }

void BlockSpec::validate() const {
  if (c_in < 1 || c_out < 1) throw ConfigError("block channels must be positive");
  if (stride < 1) throw ConfigError("block stride must be >= 1");
  if (upgraded && c_mid != mid_channels(c_in, c_out)) {
    throw ConfigError("upgraded block needs c_mid = max(1, min(c_in, c_out) / 4)");
  }
}

// ------------------------------------------------------------- ModelConfig

int ModelConfig::stride_product() const {
  int p = 1;
  for (int s : strides) p *= s;
  return p;
}

int ModelConfig::out_h() const { return base_h * stride_product(); }
int ModelConfig::out_w() const { return base_w * stride_product(); }

std::vector<BlockSpec> ModelConfig::block_specs() const {
  std::vector<BlockSpec> specs;
  for (size_t i = 0; i < strides.size(); ++i) {
    BlockSpec b;
    b.c_in = block_channels.at(i);
    b.c_out = block_channels.at(i + 1);
    b.stride = strides[i];
    b.upgraded = upgraded_all_blocks || (upgraded_first_block && i == 0);
    b.c_mid = b.upgraded ? BlockSpec::mid_channels(b.c_in, b.c_out) : 0;
    specs.push_back(b);
  }
  return specs;
}

void ModelConfig::validate() const {
  if (base_h < 1 || base_w < 1) throw ConfigError("model.base_hw must be positive");
  if (strides.empty()) throw ConfigError("model.strides must not be empty");
  for (int s : strides) {
    if (s < 1) throw ConfigError("model.strides entries must be >= 1");
  }
  if (block_channels.size() != strides.size() + 1) {
    throw ConfigError("model.block_channels needs " + std::to_string(strides.size() + 1) + " entries (one per block boundary), got " +
                      std::to_string(block_channels.size()));
  }
  for (int c : block_channels) {
    if (c < 1) throw ConfigError("model.block_channels entries must be positive");
  }
  if (target_h != 0 || target_w != 0) {
    if (out_h() != target_h || out_w() != target_w) {
      throw ConfigError("stride product gives " + std::to_string(out_h()) + "x" + std::to_string(out_w()) +
                        " frames but the target resolution is " + std::to_string(target_h) + "x" +
                        std::to_string(target_w));
    }
  }
  temporal_spec.validate();
  for (int hdim : temporal_hidden) {
    if (hdim < 1) throw ConfigError("model.temporal_hidden entries must be positive");
  }
  if (variant == Variant::kNervCs && (!cs_dim || *cs_dim < 1)) {
    throw ConfigError("variant nerv_cs requires model.cs_dim");
  }
  if (is_disentangled(variant)) {
    if (base_h < 2 || base_w < 2) throw ConfigError("disentangled variants need base_hw >= 2x2");
    spatial_spec.validate();
    if (fusion_dim < 1 || spatial_dim < 1 || mlp_dim_phi < 1) throw ConfigError("model dims must be positive");
    if (use_fusion && variant == Variant::kEnerv && (heads_fusion < 1 || fusion_dim % heads_fusion != 0)) {
      throw ConfigError("model.fusion_dim must be divisible by model.heads_fusion");
    }
    if (use_temporal_in) {
      in_spec.validate();
      if (in_dim < 1) throw ConfigError("model.in_dim must be positive");
      for (int hdim : in_hidden) {
        if (hdim < 1) throw ConfigError("model.in_hidden entries must be positive");
      }
    }
  }
  for (const auto& b : block_specs()) b.validate();
}

// ---------------------------------------------------------------- helpers

namespace {

template <typename T>
Tensor<T> tokens_to_map(const Tensor<T>& tokens, int h, int w) {
  Tensor<T> m = nn::transpose2d(tokens);
  m.reshape({tokens.dim(1), h, w});
  return m;
}

template <typename T>
Tensor<T> map_to_tokens(const Tensor<T>& map) {
  Tensor<T> flat = map;
  flat.reshape({map.dim(0), map.dim(1) * map.dim(2)});
  return nn::transpose2d(flat);
}

template <typename T>
Tensor<T> encode_row(double t, const FreqEncodingSpec& spec) {
  Tensor<T> e({1, spec.dim()});
  positional_encode_into<T>(t, spec, e.data());
  return e;
}

template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
  for (int64_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

}  // namespace

// ------------------------------------------------------------------- build

template <typename T>
VideoINR<T> VideoINR<T>::build(const ModelConfig& config, uint64_t seed) {
  config.validate();
  VideoINR m;
  m.config_ = config;
  m.seed_ = seed;
  nn::InitRng rng(seed);
  auto& ps = m.params_;
  const int h = config.base_h, w = config.base_w;
  const int n_tokens = h * w;
  const int c0 = config.block_channels.front();
  const int pe_dim = config.temporal_spec.dim();

  auto stem_dims = [&](int out) {
    std::vector<int> dims{pe_dim};
    dims.insert(dims.end(), config.temporal_hidden.begin(), config.temporal_hidden.end());
    dims.push_back(out);
    return dims;
  };

  if (!is_disentangled(config.variant)) {
    int out = c0 * n_tokens;
    if (config.variant == Variant::kNervCs) out = *config.cs_dim * n_tokens;
    if (config.variant == Variant::kNervSplit) out = c0 * (h + w);
    m.stem_ = nn::Mlp<T>::make(ps, "temporal_mlp", stem_dims(out), rng);
    if (config.variant == Variant::kNervCs) {
      m.cs_conv_ = nn::Conv2d<T>::make(ps, "temporal_mlp.cs_conv", *config.cs_dim, c0, 1, rng);
    }
  } else {
    const int d = config.fusion_dim, dt = config.spatial_dim;
    const CoordGrid grid = make_grid(h, w);
    m.grid_tokens_ = map_to_tokens(encode_grid<T>(grid, config.spatial_spec));
    m.spatial_embed_ = nn::Linear<T>::make(ps, "spatial.embed", 2 * config.spatial_spec.dim(), dt, rng);
    if (config.use_phi) m.phi_ = nn::TransformerBlock<T>::make(ps, "phi", dt, 1, config.mlp_dim_phi, rng);
    if (dt != d) m.spatial_proj_ = nn::Linear<T>::make(ps, "spatial.proj", dt, d, rng);
    m.stem_ = nn::Mlp<T>::make(ps, "temporal_mlp", stem_dims(d), rng);
    if (config.use_fusion) {
      switch (config.variant) {
        case Variant::kEnerv:
          m.fusion_attn_ = nn::TransformerBlock<T>::make(ps, "fusion", d, config.heads_fusion, config.mlp_dim_phi, rng);
          break;
        case Variant::kEnervMlpFusion:
          m.mix_tokens_ = nn::Mlp<T>::make(ps, "fusion.tokens", {n_tokens, n_tokens, n_tokens}, rng, false);
          m.mix_channels_ = nn::Mlp<T>::make(ps, "fusion.channels", {d, config.mlp_dim_phi, d}, rng, false);
          break;
        case Variant::kEnervConvFusion:
          m.fusion_conv1_ = nn::Conv2d<T>::make(ps, "fusion.conv1", d, config.mlp_dim_phi, 3, rng);
          m.fusion_conv2_ = nn::Conv2d<T>::make(ps, "fusion.conv2", config.mlp_dim_phi, d, 3, rng);
          break;
        default: break;
      }
    }
    m.fuse_proj_ = nn::Linear<T>::make(ps, "fuse_proj", d, c0, rng);
    if (config.use_temporal_in) {
      std::vector<int> dims{config.in_spec.dim()};
      dims.insert(dims.end(), config.in_hidden.begin(), config.in_hidden.end());
      dims.push_back(config.in_dim);
      m.in_mlp_ = nn::Mlp<T>::make(ps, "in_branch.mlp", dims, rng);
    }
  }

  const bool with_in = is_disentangled(config.variant) && config.use_temporal_in;
  for (const BlockSpec& spec : config.block_specs()) {
    const std::string prefix = "blocks." + std::to_string(m.blocks_.size());
    Block b{spec, {}, std::nullopt, std::nullopt};
    const int s2 = spec.stride * spec.stride;
    if (spec.upgraded) {
      b.conv1 = nn::Conv2d<T>::make(ps, prefix + ".conv1", spec.c_in, spec.c_mid * s2, 3, rng);
      b.conv2 = nn::Conv2d<T>::make(ps, prefix + ".conv2", spec.c_mid, spec.c_out, 3, rng);
    } else {
      b.conv1 = nn::Conv2d<T>::make(ps, prefix + ".conv1", spec.c_in, spec.c_out * s2, 3, rng);
    }
    if (with_in) {
      // Zero-initialized so every block starts with plain instance normalization.
      b.in_map = nn::Linear<T>::make(ps, "in_branch.m" + std::to_string(m.blocks_.size()), config.in_dim,
                                     2 * spec.c_in, rng);
      ps[b.in_map->weight].value.zero();
      ps[*b.in_map->bias].value.zero();
    }
    m.blocks_.push_back(std::move(b));
  }
  m.head_ = nn::Conv2d<T>::make(ps, "head.conv", config.block_channels.back(), 3, 1, rng);
  return m;
}

// ---------------------------------------------------------------- blocks

template <typename T>
Tensor<T> VideoINR<T>::run_block(int i, const Tensor<T>& f, const Tensor<T>* in_feature, BlockCtx& ctx) const {
  const Block& b = blocks_.at(static_cast<size_t>(i));
  if (f.rank() != 3 || f.dim(0) != b.spec.c_in) {
    throw std::invalid_argument("block " + std::to_string(i) + ": expected " + std::to_string(b.spec.c_in) +
                                " input channels, got " + shape_to_string(f.shape()));
  }
  const Tensor<T>* x = &f;
  Tensor<T> normed;
  if (b.in_map && in_feature != nullptr) {
    const Tensor<T> raw = b.in_map->forward(params_, *in_feature);
    const int c = b.spec.c_in;
    std::vector<T> scale(static_cast<size_t>(c)), shift(static_cast<size_t>(c));
    for (int k = 0; k < c; ++k) {
      scale[k] = T(1) + raw[k];
      shift[k] = raw[c + k];
    }
    normed = nn::instance_norm_forward(f, scale, shift, static_cast<T>(kInstanceNormEps), ctx.norm);
    x = &normed;
  }
  Tensor<T> a = b.conv1.forward(params_, *x, ctx.conv1);
  a = nn::pixel_shuffle(a, b.spec.stride);
  if (b.conv2) a = b.conv2->forward(params_, a, ctx.conv2);
  ctx.pre_act = std::move(a);
  return nn::gelu(ctx.pre_act);
}

template <typename T>
Tensor<T> VideoINR<T>::block_backward(int i, BlockCtx& ctx, const Tensor<T>& dy, const Tensor<T>* in_feature,
                                      Tensor<T>* d_in_feature) {
  const Block& b = blocks_.at(static_cast<size_t>(i));
  Tensor<T> da = nn::gelu_backward(ctx.pre_act, dy);
  if (b.conv2) da = b.conv2->backward(params_, ctx.conv2, da);
  da = nn::pixel_unshuffle(da, b.spec.stride);
  Tensor<T> dx = b.conv1.backward(params_, ctx.conv1, da);
  if (b.in_map && in_feature != nullptr) {
    std::vector<T> d_scale, d_shift;
    dx = nn::instance_norm_backward(ctx.norm, dx, d_scale, d_shift);
    const int c = b.spec.c_in;
    Tensor<T> d_raw({1, 2 * c});
    for (int k = 0; k < c; ++k) {
      d_raw[k] = d_scale[k];
      d_raw[c + k] = d_shift[k];
    }
    const Tensor<T> d_l = b.in_map->backward(params_, *in_feature, d_raw);
    add_inplace(*d_in_feature, d_l);
  }
  return dx;
}

// ------------------------------------------------------------------ fusion

template <typename T>
Tensor<T> VideoINR<T>::fusion_forward(const Tensor<T>& z, FrameTape& tape) const {
  if (fusion_attn_) return fusion_attn_->forward(params_, z, tape.fusion_attn);
  if (mix_tokens_) {
    const Tensor<T> m = mix_tokens_->forward(params_, nn::transpose2d(z), tape.mix_tokens);
    Tensor<T> z1 = z;
    add_inplace(z1, nn::transpose2d(m));
    tape.mixed_mid = z1;
    Tensor<T> y = mix_channels_->forward(params_, z1, tape.mix_channels);
    add_inplace(y, z1);
    return y;
  }
  if (fusion_conv1_) {
    const Tensor<T> zc = tokens_to_map(z, config_.base_h, config_.base_w);
    tape.fconv_pre = fusion_conv1_->forward(params_, zc, tape.fconv1);
    const Tensor<T> b = fusion_conv2_->forward(params_, nn::gelu(tape.fconv_pre), tape.fconv2);
    Tensor<T> y = z;
    add_inplace(y, map_to_tokens(b));
    return y;
  }
  return z;
}

template <typename T>
Tensor<T> VideoINR<T>::fusion_backward(FrameTape& tape, const Tensor<T>& dy) {
  if (fusion_attn_) return fusion_attn_->backward(params_, tape.fusion_attn, dy);
  if (mix_tokens_) {
    Tensor<T> dz1 = mix_channels_->backward(params_, tape.mix_channels, dy);
    add_inplace(dz1, dy);
    const Tensor<T> dzt = mix_tokens_->backward(params_, tape.mix_tokens, nn::transpose2d(dz1));
    add_inplace(dz1, nn::transpose2d(dzt));
    return dz1;
  }
  if (fusion_conv1_) {
    const Tensor<T> db = tokens_to_map(dy, config_.base_h, config_.base_w);
    const Tensor<T> dg = fusion_conv2_->backward(params_, tape.fconv2, db);
    const Tensor<T> da = nn::gelu_backward(tape.fconv_pre, dg);
    const Tensor<T> dzc = fusion_conv1_->backward(params_, tape.fconv1, da);
    Tensor<T> dz = dy;
    add_inplace(dz, map_to_tokens(dzc));
    return dz;
  }
  return dy;
}

// --------------------------------------------------------------- front end

template <typename T>
void VideoINR<T>::spatial_forward(SpatialTape& tape) const {
  if (!is_disentangled(config_.variant)) return;
  tape.embedded = spatial_embed_->forward(params_, grid_tokens_);
  tape.context = phi_ ? phi_->forward(params_, tape.embedded, tape.phi) : tape.embedded;
  tape.fused_in = spatial_proj_ ? spatial_proj_->forward(params_, tape.context) : tape.context;
  tape.d_fused_in = Tensor<T>(tape.fused_in.shape());
}

template <typename T>
void VideoINR<T>::spatial_backward(SpatialTape& tape) {
  if (!is_disentangled(config_.variant)) return;
  Tensor<T> d = spatial_proj_ ? spatial_proj_->backward(params_, tape.context, tape.d_fused_in) : tape.d_fused_in;
  if (phi_) d = phi_->backward(params_, tape.phi, d);
  spatial_embed_->backward(params_, grid_tokens_, d, /*need_dx=*/false);
  tape.d_fused_in.zero();
}

template <typename T>
Tensor<T> VideoINR<T>::front_forward(const SpatialTape& spatial, double t, FrameTape& tape) const {
  const int h = config_.base_h, w = config_.base_w;
  const int c0 = config_.block_channels.front();
  const Tensor<T> enc = encode_row<T>(t, config_.temporal_spec);
  if (!is_disentangled(config_.variant)) {
    tape.stem_out = stem_.forward(params_, enc, tape.stem);
    if (config_.variant == Variant::kNervBaseline) {
      Tensor<T> f = tape.stem_out;
      f.reshape({c0, h, w});
      return f;
    }
    if (config_.variant == Variant::kNervCs) {
      Tensor<T> f = tape.stem_out;
      f.reshape({*config_.cs_dim, h, w});
      return cs_conv_->forward(params_, f, tape.cs_conv);
    }
    // split: rows A (c0 x h) then columns B (c0 x w), f[c,i,j] = A[c,i] * B[c,j]
    Tensor<T> f({c0, h, w});
    const T* a = tape.stem_out.data();
    const T* bcol = a + static_cast<int64_t>(c0) * h;
    for (int c = 0; c < c0; ++c) {
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) f.at(c, i, j) = a[c * h + i] * bcol[c * w + j];
      }
    }
    return f;
  }
  tape.temporal = stem_.forward(params_, enc, tape.stem);
  const int64_t n = spatial.fused_in.dim(0), d = spatial.fused_in.dim(1);
  tape.product = Tensor<T>({n, d});
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t k = 0; k < d; ++k) tape.product[r * d + k] = spatial.fused_in[r * d + k] * tape.temporal[k];
  }
  tape.fusion_out = fusion_forward(tape.product, tape);
  return tokens_to_map(fuse_proj_->forward(params_, tape.fusion_out), h, w);
}

template <typename T>
void VideoINR<T>::front_backward(SpatialTape& spatial, FrameTape& tape, const Tensor<T>& df) {
  const int h = config_.base_h, w = config_.base_w;
  const int c0 = config_.block_channels.front();
  if (!is_disentangled(config_.variant)) {
    Tensor<T> dv;
    if (config_.variant == Variant::kNervBaseline) {
      dv = df;
    } else if (config_.variant == Variant::kNervCs) {
      dv = cs_conv_->backward(params_, tape.cs_conv, df);
    } else {
      dv = Tensor<T>(tape.stem_out.shape());
      const T* a = tape.stem_out.data();
      const T* bcol = a + static_cast<int64_t>(c0) * h;
      T* da = dv.data();
      T* db = da + static_cast<int64_t>(c0) * h;
      for (int c = 0; c < c0; ++c) {
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            const T g = df.at(c, i, j);
            da[c * h + i] += g * bcol[c * w + j];
            db[c * w + j] += g * a[c * h + i];
          }
        }
      }
    }
    dv.reshape(tape.stem_out.shape());
    stem_.backward(params_, tape.stem, dv, /*need_dx=*/false);
    return;
  }
  const Tensor<T> dp = map_to_tokens(df);
  Tensor<T> dz = fuse_proj_->backward(params_, tape.fusion_out, dp);
  dz = fusion_backward(tape, dz);
  const int64_t n = spatial.fused_in.dim(0), d = spatial.fused_in.dim(1);
  Tensor<T> dtemporal({1, d});
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t k = 0; k < d; ++k) {
      const T g = dz[r * d + k];
      dtemporal[k] += g * spatial.fused_in[r * d + k];
      spatial.d_fused_in[r * d + k] += g * tape.temporal[k];
    }
  }
  stem_.backward(params_, tape.stem, dtemporal, /*need_dx=*/false);
}

// ------------------------------------------------------------ whole frame

template <typename T>
Tensor<T> VideoINR<T>::frame_forward(const SpatialTape& spatial, double t, FrameTape& tape) const {
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("frame index t must lie in [0,1], got " + std::to_string(t));
  tape.t = t;
  Tensor<T> x = front_forward(spatial, t, tape);
  const Tensor<T>* in_feature = nullptr;
  if (in_mlp_) {
    tape.in_feature = in_mlp_->forward(params_, encode_row<T>(t, config_.in_spec), tape.in_mlp);
    in_feature = &tape.in_feature;
  }
  tape.blocks.resize(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) x = run_block(static_cast<int>(i), x, in_feature, tape.blocks[i]);
  Tensor<T> y = head_.forward(params_, x, tape.head);
  for (auto& v : y.span()) v = T(1) / (T(1) + std::exp(-v));
  tape.frame = y;
  return y;
}

template <typename T>
void VideoINR<T>::frame_backward(SpatialTape& spatial, FrameTape& tape, const Tensor<T>& d_frame) {
  require_shape(d_frame, tape.frame.shape(), "frame gradient");
  Tensor<T> d_pre(d_frame.shape());
  for (int64_t i = 0; i < d_pre.size(); ++i) {
    const T s = tape.frame[i];
    d_pre[i] = d_frame[i] * s * (T(1) - s);
  }
  Tensor<T> dx = head_.backward(params_, tape.head, d_pre);
  Tensor<T> d_in_feature;
  const Tensor<T>* in_feature = nullptr;
  if (in_mlp_) {
    d_in_feature = Tensor<T>(tape.in_feature.shape());
    in_feature = &tape.in_feature;
  }
  for (size_t i = blocks_.size(); i-- > 0;) {
    dx = block_backward(static_cast<int>(i), tape.blocks[i], dx, in_feature, &d_in_feature);
  }
  if (in_mlp_) in_mlp_->backward(params_, tape.in_mlp, d_in_feature, /*need_dx=*/false);
  front_backward(spatial, tape, dx);
}

// --------------------------------------------------- component evaluations

template <typename T>
Tensor<T> VideoINR<T>::spatial_context() const {
  if (!is_disentangled(config_.variant)) throw ConfigError("spatial_context needs a disentangled variant");
  SpatialTape tape;
  spatial_forward(tape);
  return tokens_to_map(tape.context, config_.base_h, config_.base_w);
}

template <typename T>
Tensor<T> VideoINR<T>::temporal_vector(double t) const {
  if (!is_disentangled(config_.variant)) throw ConfigError("temporal_vector needs a disentangled variant");
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("frame index t must lie in [0,1], got " + std::to_string(t));
  typename nn::Mlp<T>::Ctx ctx;
  Tensor<T> v = stem_.forward(params_, encode_row<T>(t, config_.temporal_spec), ctx);
  v.reshape({v.dim(1)});
  return v;
}

template <typename T>
Tensor<T> VideoINR<T>::fuse(const Tensor<T>& temporal_vec, const Tensor<T>& spatial) const {
  if (!is_disentangled(config_.variant)) throw ConfigError("fuse needs a disentangled variant");
  if (spatial.rank() != 3 || spatial.dim(0) != config_.spatial_dim || spatial.dim(1) != config_.base_h ||
      spatial.dim(2) != config_.base_w) {
    throw ConfigError("fuse: spatial context must be d_t x h x w, got " + shape_to_string(spatial.shape()));
  }
  if (temporal_vec.size() != config_.fusion_dim) {
    throw ConfigError("fuse: temporal vector has " + std::to_string(temporal_vec.size()) + " entries, expected " +
                      std::to_string(config_.fusion_dim));
  }
  Tensor<T> tokens = map_to_tokens(spatial);
  if (spatial_proj_) tokens = spatial_proj_->forward(params_, tokens);
  const int64_t n = tokens.dim(0), d = tokens.dim(1);
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t k = 0; k < d; ++k) tokens[r * d + k] *= temporal_vec[k];
  }
  FrameTape tape;
  const Tensor<T> z = fusion_forward(tokens, tape);
  return tokens_to_map(fuse_proj_->forward(params_, z), config_.base_h, config_.base_w);
}

template <typename T>
std::pair<std::vector<T>, std::vector<T>> VideoINR<T>::in_statistics(int block, double t) const {
  const Block& b = blocks_.at(static_cast<size_t>(block));
  if (!in_mlp_ || !b.in_map) throw ConfigError("temporal instance normalization is disabled for this model");
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("frame index t must lie in [0,1], got " + std::to_string(t));
  typename nn::Mlp<T>::Ctx ctx;
  const Tensor<T> l = in_mlp_->forward(params_, encode_row<T>(t, config_.in_spec), ctx);
  const Tensor<T> raw = b.in_map->forward(params_, l);
  const int c = b.spec.c_in;
  std::vector<T> scale(static_cast<size_t>(c)), shift(static_cast<size_t>(c));
  for (int k = 0; k < c; ++k) {
    scale[k] = T(1) + raw[k];
    shift[k] = raw[c + k];
  }
  return {scale, shift};
}

template <typename T>
Tensor<T> VideoINR<T>::temporal_in(int block, const Tensor<T>& f, double t) const {
  auto [scale, shift] = in_statistics(block, t);
  nn::InstanceNormCtx<T> ctx;
  return nn::instance_norm_forward(f, scale, shift, static_cast<T>(kInstanceNormEps), ctx);
}

template <typename T>
Tensor<T> VideoINR<T>::block_forward(int block, const Tensor<T>& f) const {
  BlockCtx ctx;
  return run_block(block, f, nullptr, ctx);
}

template <typename T>
Tensor<T> VideoINR<T>::forward(double t) const {
  SpatialTape spatial;
  spatial_forward(spatial);
  FrameTape tape;
  return frame_forward(spatial, t, tape);
}

template class VideoINR<float>;
template class VideoINR<double>;

}  // namespace enerv
