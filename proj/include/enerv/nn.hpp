// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "enerv/tensor.hpp"

// Layers with explicit backward passes. Layers are plain value types that hold
// indices into a ParamStore; forward never mutates parameters, backward only
// accumulates into Parameter::grad. Anything a backward pass needs from the
// forward pass is returned to the caller in a per-layer context struct.

namespace enerv::nn {

template <typename T>
struct Parameter {
  std::string name;  // dotted path, e.g. "blocks.0.conv1.weight"; first component is the group
  Tensor<T> value;
  Tensor<T> grad;
  bool is_bias = false;

  std::string group() const { return name.substr(0, name.find('.')); }
};

/// Deterministic source for parameter initialization.
class InitRng {
 public:
  explicit InitRng(uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    // 53 random bits -> [0,1); independent of the standard library's distributions.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
class ParamStore {
 public:
  /// Adds a parameter initialized U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  size_t add(std::string name, Shape shape, int64_t fan_in, bool is_bias, InitRng& rng);
  /// Adds a zero-initialized parameter.
  size_t add_zeros(std::string name, Shape shape, bool is_bias);

  Parameter<T>& operator[](size_t i) { return params_[i]; }
  const Parameter<T>& operator[](size_t i) const { return params_[i]; }
  size_t size() const { return params_.size(); }
  std::vector<Parameter<T>>& all() { return params_; }
  const std::vector<Parameter<T>>& all() const { return params_; }

  Parameter<T>* find(const std::string& name);
  const Parameter<T>* find(const std::string& name) const;

  void zero_grad();
  int64_t numel() const;

 private:
  std::vector<Parameter<T>> params_;
};

/// y = x W^T + b on row-major token matrices (N x in -> N x out).
template <typename T>
struct Linear {
  int in = 0;
  int out = 0;
  size_t weight = 0;
  std::optional<size_t> bias;

  static Linear make(ParamStore<T>& ps, const std::string& prefix, int in, int out, InitRng& rng,
                     bool with_bias = true);
  Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x) const;
  /// Accumulates parameter gradients; returns dx when need_dx.
  Tensor<T> backward(ParamStore<T>& ps, const Tensor<T>& x, const Tensor<T>& dy, bool need_dx = true) const;
};

/// Chain of Linear layers, each followed by GELU when gelu_after_each.
template <typename T>
struct Mlp {
  struct Ctx {
    std::vector<Tensor<T>> inputs;  // input of each linear
    std::vector<Tensor<T>> pre;     // pre-activation of each linear
  };
  std::vector<Linear<T>> layers;
  bool gelu_after_each = true;

  static Mlp make(ParamStore<T>& ps, const std::string& prefix, const std::vector<int>& dims, InitRng& rng,
                  bool gelu_after_each = true);
  Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const;
  Tensor<T> backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy, bool need_dx = true) const;
};

/// Multi-head self-attention without output projection: each head attends
/// over all tokens with softmax(q k^T / sqrt(dh)) v; heads are concatenated.
template <typename T>
struct SelfAttention {
  struct Ctx {
    Tensor<T> x, q, k, v;
    Tensor<T> probs;  // heads x N x N
  };
  int dim = 0;
  int heads = 1;
  Linear<T> fq, fk, fv;

  static SelfAttention make(ParamStore<T>& ps, const std::string& prefix, int dim, int heads, InitRng& rng);
  Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const;
  Tensor<T> backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy) const;
};

/// Attention block with residual followed by a GELU feed-forward with
/// residual. No normalization layers.
template <typename T>
struct TransformerBlock {
  struct Ctx {
    typename SelfAttention<T>::Ctx attn;
    typename Mlp<T>::Ctx ffn;
  };
  SelfAttention<T> attn;
  Mlp<T> ffn;  // dim -> hidden (GELU) -> dim (linear)

  static TransformerBlock make(ParamStore<T>& ps, const std::string& prefix, int dim, int heads, int hidden,
                               InitRng& rng);
  Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const;
  Tensor<T> backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy) const;
};

/// Square-kernel convolution, stride 1, "same" zero padding, on C x H x W maps.
template <typename T>
struct Conv2d {
  struct Ctx {
    Tensor<T> col;  // (cin*k*k) x (H*W); empty for 1x1 where the input is used directly
    Tensor<T> x;    // kept for 1x1
    int64_t h = 0, w = 0;
  };
  int cin = 0;
  int cout = 0;
  int ksize = 3;
  size_t weight = 0;
  std::optional<size_t> bias;

  static Conv2d make(ParamStore<T>& ps, const std::string& prefix, int cin, int cout, int ksize, InitRng& rng,
                     bool with_bias = true);
  Tensor<T> forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const;
  Tensor<T> backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy, bool need_dx = true) const;
};

// ---- parameter-free ops ----

template <typename T>
Tensor<T> gelu(const Tensor<T>& x);
template <typename T>
Tensor<T> gelu_backward(const Tensor<T>& x, const Tensor<T>& dy);

/// (C*s*s) x H x W -> C x (H*s) x (W*s); channel c*s*s + i*s + j lands at (y*s+i, x*s+j).
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int s);
/// Inverse permutation of pixel_shuffle (also its backward).
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int s);

template <typename T>
Tensor<T> transpose2d(const Tensor<T>& x);

/// Per-channel instance normalization across spatial axes, re-scaled and
/// re-shifted by externally supplied per-channel (scale, shift).
template <typename T>
struct InstanceNormCtx {
  Tensor<T> xhat;               // normalized input
  std::vector<T> inv_std;       // per channel
  std::vector<T> scale;         // applied per-channel scale
};

template <typename T>
Tensor<T> instance_norm_forward(const Tensor<T>& x, const std::vector<T>& scale, const std::vector<T>& shift, T eps,
                                InstanceNormCtx<T>& ctx);
/// Returns dx and fills d_scale / d_shift (overwritten).
template <typename T>
Tensor<T> instance_norm_backward(const InstanceNormCtx<T>& ctx, const Tensor<T>& dy, std::vector<T>& d_scale,
                                 std::vector<T>& d_shift);

}  // namespace enerv::nn
