// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <algorithm>
#include <cmath>
#include <cstring>

#include "enerv/kernels.hpp"
#include "enerv/nn.hpp"

namespace enerv::nn {

namespace kn = enerv::kernels;

// ---------------------------------------------------------------- ParamStore

template <typename T>
size_t ParamStore<T>::add(std::string name, Shape shape, int64_t fan_in, bool is_bias, InitRng& rng) {
  Parameter<T> p;
  p.name = std::move(name);
  p.value = Tensor<T>(shape);
  p.grad = Tensor<T>(shape);
  p.is_bias = is_bias;
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<int64_t>(fan_in, 1)));
  for (auto& v : p.value.span()) v = static_cast<T>(rng.uniform(-bound, bound));
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

template <typename T>
size_t ParamStore<T>::add_zeros(std::string name, Shape shape, bool is_bias) {
  Parameter<T> p;
  p.name = std::move(name);
  p.value = Tensor<T>(shape);
  p.grad = Tensor<T>(shape);
  p.is_bias = is_bias;
  params_.push_back(std::move(p));
  return params_.size() - 1;
}

template <typename T>
Parameter<T>* ParamStore<T>::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
const Parameter<T>* ParamStore<T>::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& p : params_) p.grad.zero();
}

template <typename T>
int64_t ParamStore<T>::numel() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

// -------------------------------------------------------------------- Linear

template <typename T>
Linear<T> Linear<T>::make(ParamStore<T>& ps, const std::string& prefix, int in, int out, InitRng& rng,
                          bool with_bias) {
  Linear l;
  l.in = in;
  l.out = out;
  l.weight = ps.add(prefix + ".weight", {out, in}, in, false, rng);
  if (with_bias) l.bias = ps.add(prefix + ".bias", {out}, in, true, rng);
  return l;
}

template <typename T>
Tensor<T> Linear<T>::forward(const ParamStore<T>& ps, const Tensor<T>& x) const {
  if (x.rank() != 2 || x.dim(1) != in) {
    throw std::invalid_argument("Linear: expected N x " + std::to_string(in) + " input, got " +
                                shape_to_string(x.shape()));
  }
  const int n = static_cast<int>(x.dim(0));
  Tensor<T> y({n, out});
  kn::gemm<T>(false, true, n, out, in, T(1), x.data(), in, ps[weight].value.data(), in, T(0), y.data(), out);
  if (bias) {
    const T* b = ps[*bias].value.data();
    for (int i = 0; i < n; ++i) {
      T* row = y.data() + static_cast<int64_t>(i) * out;
      for (int j = 0; j < out; ++j) row[j] += b[j];
    }
  }
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(ParamStore<T>& ps, const Tensor<T>& x, const Tensor<T>& dy, bool need_dx) const {
  const int n = static_cast<int>(x.dim(0));
  kn::gemm<T>(true, false, out, in, n, T(1), dy.data(), out, x.data(), in, T(1), ps[weight].grad.data(), in);
  if (bias) {
    T* db = ps[*bias].grad.data();
    for (int i = 0; i < n; ++i) {
      const T* row = dy.data() + static_cast<int64_t>(i) * out;
      for (int j = 0; j < out; ++j) db[j] += row[j];
    }
  }
  if (!need_dx) return {};
  Tensor<T> dx({n, in});
  kn::gemm<T>(false, false, n, in, out, T(1), dy.data(), out, ps[weight].value.data(), in, T(0), dx.data(), in);
  return dx;
}

// ----------------------------------------------------------------------- Mlp

template <typename T>
Mlp<T> Mlp<T>::make(ParamStore<T>& ps, const std::string& prefix, const std::vector<int>& dims, InitRng& rng,
                    bool gelu_after_each) {
  Mlp m;
  m.gelu_after_each = gelu_after_each;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    m.layers.push_back(Linear<T>::make(ps, prefix + ".fc" + std::to_string(i), dims[i], dims[i + 1], rng));
  }
  return m;
}

template <typename T>
Tensor<T> Mlp<T>::forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const {
  ctx.inputs.clear();
  ctx.pre.clear();
  Tensor<T> h = x;
  for (size_t i = 0; i < layers.size(); ++i) {
    ctx.inputs.push_back(h);
    Tensor<T> pre = layers[i].forward(ps, h);
    const bool act = gelu_after_each || i + 1 < layers.size();
    h = act ? gelu(pre) : pre;
    ctx.pre.push_back(std::move(pre));
  }
  return h;
}

template <typename T>
Tensor<T> Mlp<T>::backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy, bool need_dx) const {
  Tensor<T> d = dy;
  for (size_t li = layers.size(); li-- > 0;) {
    const bool act = gelu_after_each || li + 1 < layers.size();
    if (act) d = gelu_backward(ctx.pre[li], d);
    d = layers[li].backward(ps, ctx.inputs[li], d, need_dx || li > 0);
  }
  return d;
}

// ------------------------------------------------------------- SelfAttention

template <typename T>
SelfAttention<T> SelfAttention<T>::make(ParamStore<T>& ps, const std::string& prefix, int dim, int heads,
                                        InitRng& rng) {
  if (heads < 1 || dim % heads != 0) {
    throw std::invalid_argument("SelfAttention: dim " + std::to_string(dim) + " not divisible by heads " +
                                std::to_string(heads));
  }
  SelfAttention a;
  a.dim = dim;
  a.heads = heads;
  a.fq = Linear<T>::make(ps, prefix + ".q", dim, dim, rng);
  a.fk = Linear<T>::make(ps, prefix + ".k", dim, dim, rng);
  a.fv = Linear<T>::make(ps, prefix + ".v", dim, dim, rng);
  return a;
}

template <typename T>
Tensor<T> SelfAttention<T>::forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const {
  const int n = static_cast<int>(x.dim(0));
  const int dh = dim / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  ctx.x = x;
  ctx.q = fq.forward(ps, x);
  ctx.k = fk.forward(ps, x);
  ctx.v = fv.forward(ps, x);
  ctx.probs = Tensor<T>({heads, n, n});
  Tensor<T> out({n, dim});
  for (int h = 0; h < heads; ++h) {
    T* p = ctx.probs.data() + static_cast<int64_t>(h) * n * n;
    kn::gemm<T>(false, true, n, n, dh, scale, ctx.q.data() + h * dh, dim, ctx.k.data() + h * dh, dim, T(0), p, n);
    for (int i = 0; i < n; ++i) {
      T* row = p + static_cast<int64_t>(i) * n;
      const T mx = *std::max_element(row, row + n);
      T sum = 0;
      for (int j = 0; j < n; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
      }
      const T inv = T(1) / sum;
      for (int j = 0; j < n; ++j) row[j] *= inv;
    }
    kn::gemm<T>(false, false, n, dh, n, T(1), p, n, ctx.v.data() + h * dh, dim, T(0), out.data() + h * dh, dim);
  }
  return out;
}

template <typename T>
Tensor<T> SelfAttention<T>::backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy) const {
  const int n = static_cast<int>(ctx.x.dim(0));
  const int dh = dim / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Tensor<T> dq({n, dim}), dk({n, dim}), dv({n, dim});
  Tensor<T> dp({n, n});
  for (int h = 0; h < heads; ++h) {
    const T* p = ctx.probs.data() + static_cast<int64_t>(h) * n * n;
    const T* dout = dy.data() + h * dh;
    kn::gemm<T>(false, true, n, n, dh, T(1), dout, dim, ctx.v.data() + h * dh, dim, T(0), dp.data(), n);
    kn::gemm<T>(true, false, n, dh, n, T(1), p, n, dout, dim, T(0), dv.data() + h * dh, dim);
    // softmax backward, folded with the score scale
    for (int i = 0; i < n; ++i) {
      T* drow = dp.data() + static_cast<int64_t>(i) * n;
      const T* prow = p + static_cast<int64_t>(i) * n;
      T dot = 0;
      for (int j = 0; j < n; ++j) dot += drow[j] * prow[j];
      for (int j = 0; j < n; ++j) drow[j] = prow[j] * (drow[j] - dot) * scale;
    }
    kn::gemm<T>(false, false, n, dh, n, T(1), dp.data(), n, ctx.k.data() + h * dh, dim, T(0), dq.data() + h * dh,
                dim);
    kn::gemm<T>(true, false, n, dh, n, T(1), dp.data(), n, ctx.q.data() + h * dh, dim, T(0), dk.data() + h * dh,
                dim);
  }
  Tensor<T> dx = fq.backward(ps, ctx.x, dq);
  const Tensor<T> dxk = fk.backward(ps, ctx.x, dk);
  const Tensor<T> dxv = fv.backward(ps, ctx.x, dv);
  for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dxk[i] + dxv[i];
  return dx;
}

// ---------------------------------------------------------- TransformerBlock

template <typename T>
TransformerBlock<T> TransformerBlock<T>::make(ParamStore<T>& ps, const std::string& prefix, int dim, int heads,
                                              int hidden, InitRng& rng) {
  TransformerBlock b;
  b.attn = SelfAttention<T>::make(ps, prefix + ".attn", dim, heads, rng);
  b.ffn = Mlp<T>::make(ps, prefix + ".ffn", {dim, hidden, dim}, rng, /*gelu_after_each=*/false);
  return b;
}

template <typename T>
Tensor<T> TransformerBlock<T>::forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const {
  Tensor<T> x1 = attn.forward(ps, x, ctx.attn);
  for (int64_t i = 0; i < x1.size(); ++i) x1[i] += x[i];
  Tensor<T> y = ffn.forward(ps, x1, ctx.ffn);
  for (int64_t i = 0; i < y.size(); ++i) y[i] += x1[i];
  return y;
}

template <typename T>
Tensor<T> TransformerBlock<T>::backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy) const {
  Tensor<T> dx1 = ffn.backward(ps, ctx.ffn, dy);
  for (int64_t i = 0; i < dx1.size(); ++i) dx1[i] += dy[i];
  Tensor<T> dx = attn.backward(ps, ctx.attn, dx1);
  for (int64_t i = 0; i < dx.size(); ++i) dx[i] += dx1[i];
  return dx;
}

// -------------------------------------------------------------------- Conv2d

namespace {

template <typename T>
void im2col(const T* x, int c, int h, int w, int k, T* col) {
  const int pad = k / 2;
  const int64_t hw = static_cast<int64_t>(h) * w;
  for (int ci = 0; ci < c; ++ci) {
    const T* plane = x + ci * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* dst = col + ((static_cast<int64_t>(ci) * k + ky) * k + kx) * hw;
        const int dx = kx - pad;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          T* drow = dst + static_cast<int64_t>(y) * w;
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h || x1 <= x0) {
            std::fill(drow, drow + w, T(0));
            continue;
          }
          const T* srow = plane + static_cast<int64_t>(sy) * w;
          std::fill(drow, drow + x0, T(0));
          std::memcpy(drow + x0, srow + x0 + dx, sizeof(T) * static_cast<size_t>(x1 - x0));
          std::fill(drow + x1, drow + w, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, int c, int h, int w, int k, T* x) {
  const int pad = k / 2;
  const int64_t hw = static_cast<int64_t>(h) * w;
  for (int ci = 0; ci < c; ++ci) {
    T* plane = x + ci * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* src = col + ((static_cast<int64_t>(ci) * k + ky) * k + kx) * hw;
        const int dx = kx - pad;
        const int x0 = std::max(0, -dx);
        const int x1 = std::min(w, w - dx);
        if (x1 <= x0) continue;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          kn::axpy<T>(x1 - x0, T(1), src + static_cast<int64_t>(y) * w + x0,
                      plane + static_cast<int64_t>(sy) * w + x0 + dx);
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Conv2d<T> Conv2d<T>::make(ParamStore<T>& ps, const std::string& prefix, int cin, int cout, int ksize, InitRng& rng,
                          bool with_bias) {
  if (ksize % 2 != 1) throw std::invalid_argument("Conv2d: kernel size must be odd");
  Conv2d c;
  c.cin = cin;
  c.cout = cout;
  c.ksize = ksize;
  const int64_t fan_in = static_cast<int64_t>(cin) * ksize * ksize;
  c.weight = ps.add(prefix + ".weight", {cout, cin, ksize, ksize}, fan_in, false, rng);
  if (with_bias) c.bias = ps.add(prefix + ".bias", {cout}, fan_in, true, rng);
  return c;
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const ParamStore<T>& ps, const Tensor<T>& x, Ctx& ctx) const {
  if (x.rank() != 3 || x.dim(0) != cin) {
    throw std::invalid_argument("Conv2d: expected " + std::to_string(cin) + " input channels, got " +
                                shape_to_string(x.shape()));
  }
  const int h = static_cast<int>(x.dim(1));
  const int w = static_cast<int>(x.dim(2));
  const int hw = h * w;
  const int kdim = cin * ksize * ksize;
  ctx.h = h;
  ctx.w = w;
  const T* col = nullptr;
  if (ksize == 1) {
    ctx.x = x;
    ctx.col = Tensor<T>();
    col = ctx.x.data();
  } else {
    ctx.x = Tensor<T>();
    ctx.col = Tensor<T>({kdim, hw});
    im2col(x.data(), cin, h, w, ksize, ctx.col.data());
    col = ctx.col.data();
  }
  Tensor<T> y({cout, h, w});
  kn::gemm<T>(false, false, cout, hw, kdim, T(1), ps[weight].value.data(), kdim, col, hw, T(0), y.data(), hw);
  if (bias) {
    const T* b = ps[*bias].value.data();
    for (int co = 0; co < cout; ++co) {
      T* plane = y.data() + static_cast<int64_t>(co) * hw;
      for (int i = 0; i < hw; ++i) plane[i] += b[co];
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(ParamStore<T>& ps, const Ctx& ctx, const Tensor<T>& dy, bool need_dx) const {
  const int h = static_cast<int>(ctx.h);
  const int w = static_cast<int>(ctx.w);
  const int hw = h * w;
  const int kdim = cin * ksize * ksize;
  const T* col = ksize == 1 ? ctx.x.data() : ctx.col.data();
  kn::gemm<T>(false, true, cout, kdim, hw, T(1), dy.data(), hw, col, hw, T(1), ps[weight].grad.data(), kdim);
  if (bias) {
    T* db = ps[*bias].grad.data();
    for (int co = 0; co < cout; ++co) {
      const T* plane = dy.data() + static_cast<int64_t>(co) * hw;
      T s = 0;
      for (int i = 0; i < hw; ++i) s += plane[i];
      db[co] += s;
    }
  }
  if (!need_dx) return {};
  Tensor<T> dx({cin, h, w});
  if (ksize == 1) {
    kn::gemm<T>(true, false, cin, hw, cout, T(1), ps[weight].value.data(), cin, dy.data(), hw, T(0), dx.data(), hw);
    return dx;
  }
  Tensor<T> dcol({kdim, hw});
  kn::gemm<T>(true, false, kdim, hw, cout, T(1), ps[weight].value.data(), kdim, dy.data(), hw, T(0), dcol.data(), hw);
  col2im_add(dcol.data(), cin, h, w, ksize, dx.data());
  return dx;
}

// ----------------------------------------------------------- free functions

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  kn::gelu_forward<T>(x.size(), x.data(), y.data());
  return y;
}

template <typename T>
Tensor<T> gelu_backward(const Tensor<T>& x, const Tensor<T>& dy) {
  Tensor<T> dx(x.shape());
  kn::gelu_backward<T>(x.size(), x.data(), dy.data(), dx.data());
  return dx;
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int s) {
  const int64_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (s < 1 || cin % (static_cast<int64_t>(s) * s) != 0) {
    throw std::invalid_argument("pixel_shuffle: channels " + std::to_string(cin) + " not divisible by s^2");
  }
  const int64_t c = cin / (s * s);
  Tensor<T> y({c, h * s, w * s});
  for (int64_t co = 0; co < c; ++co) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const T* src = x.data() + ((co * s + i) * s + j) * h * w;
        for (int64_t yy = 0; yy < h; ++yy) {
          T* dst = y.data() + (co * h * s + yy * s + i) * (w * s) + j;
          const T* srow = src + yy * w;
          for (int64_t xx = 0; xx < w; ++xx) dst[xx * s] = srow[xx];
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& y, int s) {
  const int64_t c = y.dim(0), hs = y.dim(1), ws = y.dim(2);
  if (s < 1 || hs % s != 0 || ws % s != 0) throw std::invalid_argument("pixel_unshuffle: size not divisible by s");
  const int64_t h = hs / s, w = ws / s;
  Tensor<T> x({c * s * s, h, w});
  for (int64_t co = 0; co < c; ++co) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        T* dst = x.data() + ((co * s + i) * s + j) * h * w;
        for (int64_t yy = 0; yy < h; ++yy) {
          const T* src = y.data() + (co * hs + yy * s + i) * ws + j;
          T* drow = dst + yy * w;
          for (int64_t xx = 0; xx < w; ++xx) drow[xx] = src[xx * s];
        }
      }
    }
  }
  return x;
}

template <typename T>
Tensor<T> transpose2d(const Tensor<T>& x) {
  const int64_t r = x.dim(0), c = x.dim(1);
  Tensor<T> y({c, r});
  for (int64_t i = 0; i < r; ++i) {
    for (int64_t j = 0; j < c; ++j) y[j * r + i] = x[i * c + j];
  }
  return y;
}

template <typename T>
Tensor<T> instance_norm_forward(const Tensor<T>& x, const std::vector<T>& scale, const std::vector<T>& shift, T eps,
                                InstanceNormCtx<T>& ctx) {
  const int64_t c = x.dim(0);
  const int64_t n = x.dim(1) * x.dim(2);
  if (static_cast<int64_t>(scale.size()) != c || static_cast<int64_t>(shift.size()) != c) {
    throw std::invalid_argument("instance_norm: statistics size mismatch");
  }
  ctx.xhat = Tensor<T>(x.shape());
  ctx.inv_std.assign(static_cast<size_t>(c), T(0));
  ctx.scale = scale;
  Tensor<T> y(x.shape());
  for (int64_t ci = 0; ci < c; ++ci) {
    const T* src = x.data() + ci * n;
    T mean = 0;
    for (int64_t i = 0; i < n; ++i) mean += src[i];
    mean /= static_cast<T>(n);
    T var = 0;
    for (int64_t i = 0; i < n; ++i) var += (src[i] - mean) * (src[i] - mean);
    var /= static_cast<T>(n);
    const T inv = T(1) / std::sqrt(var + eps);
    ctx.inv_std[ci] = inv;
    T* xh = ctx.xhat.data() + ci * n;
    T* dst = y.data() + ci * n;
    for (int64_t i = 0; i < n; ++i) {
      xh[i] = (src[i] - mean) * inv;
      dst[i] = scale[ci] * xh[i] + shift[ci];
    }
  }
  return y;
}

template <typename T>
Tensor<T> instance_norm_backward(const InstanceNormCtx<T>& ctx, const Tensor<T>& dy, std::vector<T>& d_scale,
                                 std::vector<T>& d_shift) {
  const int64_t c = dy.dim(0);
  const int64_t n = dy.dim(1) * dy.dim(2);
  d_scale.assign(static_cast<size_t>(c), T(0));
  d_shift.assign(static_cast<size_t>(c), T(0));
  Tensor<T> dx(dy.shape());
  for (int64_t ci = 0; ci < c; ++ci) {
    const T* g = dy.data() + ci * n;
    const T* xh = ctx.xhat.data() + ci * n;
    T sum_g = 0, sum_gx = 0;
    for (int64_t i = 0; i < n; ++i) {
      sum_g += g[i];
      sum_gx += g[i] * xh[i];
    }
    d_shift[ci] = sum_g;
    d_scale[ci] = sum_gx;
    // with dxhat = scale * g
    const T s = ctx.scale[ci];
    const T k = ctx.inv_std[ci] / static_cast<T>(n);
    T* out = dx.data() + ci * n;
    for (int64_t i = 0; i < n; ++i) {
      out[i] = k * (static_cast<T>(n) * s * g[i] - s * sum_g - xh[i] * s * sum_gx);
    }
  }
  return dx;
}

#define ENERV_INSTANTIATE_NN(T)                                                                                   \
  template class ParamStore<T>;                                                                                   \
  template struct Linear<T>;                                                                                      \
  template struct Mlp<T>;                                                                                         \
  template struct SelfAttention<T>;                                                                               \
  template struct TransformerBlock<T>;                                                                            \
  template struct Conv2d<T>;                                                                                      \
  template Tensor<T> gelu<T>(const Tensor<T>&);                                                                   \
  template Tensor<T> gelu_backward<T>(const Tensor<T>&, const Tensor<T>&);                                        \
  template Tensor<T> pixel_shuffle<T>(const Tensor<T>&, int);                                                     \
  template Tensor<T> pixel_unshuffle<T>(const Tensor<T>&, int);                                                   \
  template Tensor<T> transpose2d<T>(const Tensor<T>&);                                                            \
  template Tensor<T> instance_norm_forward<T>(const Tensor<T>&, const std::vector<T>&, const std::vector<T>&, T,  \
                                              InstanceNormCtx<T>&);                                               \
  template Tensor<T> instance_norm_backward<T>(const InstanceNormCtx<T>&, const Tensor<T>&, std::vector<T>&,      \
                                               std::vector<T>&);

ENERV_INSTANTIATE_NN(float)
ENERV_INSTANTIATE_NN(double)
#undef ENERV_INSTANTIATE_NN

}  // namespace enerv::nn
