// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <cmath>

#include "doctest.h"
#include "enerv/nn.hpp"
#include "support.hpp"

using namespace enerv;
using enerv::testing::compare_gradients;
using enerv::testing::dot;
using enerv::testing::random_tensor;

namespace {

// Checks d<r, f(x)>/dparams and d/dx for a layer wrapped in `fwd` / `bwd`.
template <typename Fwd, typename Bwd>
void check_layer(nn::ParamStore<double>& ps, Tensor<double> x, const Shape& out_shape, Fwd fwd, Bwd bwd) {
  const auto r = random_tensor<double>(out_shape, 99);
  ps.zero_grad();
  const Tensor<double> dx = bwd(x, r);
  auto loss = [&] { return dot(fwd(x), r); };
  auto rep = compare_gradients(ps, loss, 1e-5, 12, 7);
  CHECK_MESSAGE(rep.worst < 1e-6, rep.where);
  double worst = 0;
  for (int64_t i = 0; i < std::min<int64_t>(x.size(), 24); ++i) {
    const double o = x[i];
    x[i] = o + 1e-5;
    const double up = loss();
    x[i] = o - 1e-5;
    const double dn = loss();
    x[i] = o;
    worst = std::max(worst, enerv::testing::rel_err(dx[i], (up - dn) / 2e-5));
  }
  CHECK(worst < 1e-6);
}

}  // namespace

TEST_CASE("Linear forward matches definition and gradients") {
  nn::ParamStore<double> ps;
  nn::InitRng rng(1);
  auto lin = nn::Linear<double>::make(ps, "l", 5, 3, rng);
  auto x = random_tensor<double>({4, 5}, 2);
  auto y = lin.forward(ps, x);
  const auto& w = ps[lin.weight].value;
  const auto& b = ps[*lin.bias].value;
  for (int n = 0; n < 4; ++n) {
    for (int o = 0; o < 3; ++o) {
      double s = b[o];
      for (int i = 0; i < 5; ++i) s += x[n * 5 + i] * w[o * 5 + i];
      CHECK(y[n * 3 + o] == doctest::Approx(s).epsilon(1e-12));
    }
  }
  check_layer(ps, x, {4, 3}, [&](const Tensor<double>& in) { return lin.forward(ps, in); },
              [&](const Tensor<double>& in, const Tensor<double>& dy) { return lin.backward(ps, in, dy); });
}

TEST_CASE("initialization is uniform within the fan-in bound and seeded") {
  nn::ParamStore<float> a, b;
  nn::InitRng ra(5), rb(5);
  nn::Linear<float>::make(a, "l", 64, 32, ra);
  nn::Linear<float>::make(b, "l", 64, 32, rb);
  CHECK(a[0].value == b[0].value);
  for (float v : a[0].value.span()) CHECK(std::fabs(v) <= 1.f / 8.f);
}

TEST_CASE("Mlp gradients") {
  for (bool every : {true, false}) {
    nn::ParamStore<double> ps;
    nn::InitRng rng(3);
    auto mlp = nn::Mlp<double>::make(ps, "m", {6, 8, 4}, rng, every);
    typename nn::Mlp<double>::Ctx ctx;
    check_layer(ps, random_tensor<double>({3, 6}, 4), {3, 4},
                [&](const Tensor<double>& in) { return mlp.forward(ps, in, ctx); },
                [&](const Tensor<double>& in, const Tensor<double>& dy) {
                  mlp.forward(ps, in, ctx);
                  return mlp.backward(ps, ctx, dy);
                });
  }
}

TEST_CASE("SelfAttention rows sum to one and gradients match") {
  for (int heads : {1, 2}) {
    nn::ParamStore<double> ps;
    nn::InitRng rng(4);
    auto att = nn::SelfAttention<double>::make(ps, "a", 8, heads, rng);
    typename nn::SelfAttention<double>::Ctx ctx;
    auto x = random_tensor<double>({5, 8}, 5);
    att.forward(ps, x, ctx);
    for (int h = 0; h < heads; ++h) {
      for (int i = 0; i < 5; ++i) {
        double s = 0;
        for (int j = 0; j < 5; ++j) s += ctx.probs[(h * 5 + i) * 5 + j];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    check_layer(ps, x, {5, 8}, [&](const Tensor<double>& in) { return att.forward(ps, in, ctx); },
                [&](const Tensor<double>& in, const Tensor<double>& dy) {
                  att.forward(ps, in, ctx);
                  return att.backward(ps, ctx, dy);
                });
  }
}

TEST_CASE("TransformerBlock with zeroed value and ffn output is the identity") {
  nn::ParamStore<double> ps;
  nn::InitRng rng(6);
  auto blk = nn::TransformerBlock<double>::make(ps, "t", 8, 2, 16, rng);
  typename nn::TransformerBlock<double>::Ctx ctx;
  auto x = random_tensor<double>({6, 8}, 7);
  check_layer(ps, x, {6, 8}, [&](const Tensor<double>& in) { return blk.forward(ps, in, ctx); },
              [&](const Tensor<double>& in, const Tensor<double>& dy) {
                blk.forward(ps, in, ctx);
                return blk.backward(ps, ctx, dy);
              });
  ps[blk.attn.fv.weight].value.zero();
  ps[*blk.attn.fv.bias].value.zero();
  ps[blk.ffn.layers.back().weight].value.zero();
  ps[*blk.ffn.layers.back().bias].value.zero();
  CHECK(blk.forward(ps, x, ctx) == x);
}

TEST_CASE("Conv2d matches direct convolution and gradients") {
  for (int k : {1, 3}) {
    nn::ParamStore<double> ps;
    nn::InitRng rng(8);
    auto conv = nn::Conv2d<double>::make(ps, "c", 3, 4, k, rng);
    typename nn::Conv2d<double>::Ctx ctx;
    auto x = random_tensor<double>({3, 5, 6}, 9);
    auto y = conv.forward(ps, x, ctx);
    REQUIRE(y.shape() == Shape{4, 5, 6});
    const auto& w = ps[conv.weight].value;
    const int pad = k / 2;
    for (int o = 0; o < 4; ++o) {
      for (int yy = 0; yy < 5; ++yy) {
        for (int xx = 0; xx < 6; ++xx) {
          double s = ps[*conv.bias].value[o];
          for (int c = 0; c < 3; ++c) {
            for (int dy = 0; dy < k; ++dy) {
              for (int dx = 0; dx < k; ++dx) {
                const int iy = yy + dy - pad, ix = xx + dx - pad;
                if (iy < 0 || iy >= 5 || ix < 0 || ix >= 6) continue;
                s += w[((o * 3 + c) * k + dy) * k + dx] * x.at(c, iy, ix);
              }
            }
          }
          CHECK(y.at(o, yy, xx) == doctest::Approx(s).epsilon(1e-12));
        }
      }
    }
    check_layer(ps, x, {4, 5, 6}, [&](const Tensor<double>& in) { return conv.forward(ps, in, ctx); },
                [&](const Tensor<double>& in, const Tensor<double>& dy) {
                  conv.forward(ps, in, ctx);
                  return conv.backward(ps, ctx, dy);
                });
  }
}

TEST_CASE("conv2d float path agrees with double path") {
  nn::ParamStore<double> pd;
  nn::InitRng rng(10);
  auto cd = nn::Conv2d<double>::make(pd, "c", 8, 16, 3, rng);
  nn::ParamStore<float> pf;
  nn::InitRng rng2(10);
  auto cf = nn::Conv2d<float>::make(pf, "c", 8, 16, 3, rng2);
  auto x = random_tensor<double>({8, 9, 16}, 11);
  typename nn::Conv2d<double>::Ctx c1;
  typename nn::Conv2d<float>::Ctx c2;
  auto yd = cd.forward(pd, x, c1);
  auto yf = cf.forward(pf, x.cast<float>(), c2);
  for (int64_t i = 0; i < yd.size(); ++i) CHECK(yf[i] == doctest::Approx(yd[i]).epsilon(1e-4));
}

TEST_CASE("pixel_shuffle layout and inverse") {
  Tensor<float> x({8, 2, 3});
  for (int64_t i = 0; i < x.size(); ++i) x[i] = float(i);
  auto y = nn::pixel_shuffle(x, 2);
  REQUIRE(y.shape() == Shape{2, 4, 6});
  for (int c = 0; c < 2; ++c) {
    for (int yy = 0; yy < 2; ++yy) {
      for (int xx = 0; xx < 3; ++xx) {
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) CHECK(y.at(c, yy * 2 + i, xx * 2 + j) == x.at(c * 4 + i * 2 + j, yy, xx));
        }
      }
    }
  }
  CHECK(nn::pixel_unshuffle(y, 2) == x);
  Tensor<float> k({25, 3, 3}, 0.25f);
  const auto ks = nn::pixel_shuffle(k, 5);
  CHECK(ks.shape() == Shape{1, 15, 15});
  for (float v : ks.span()) CHECK(v == 0.25f);
  CHECK_THROWS(nn::pixel_shuffle(Tensor<float>({3, 2, 2}), 2));
}

TEST_CASE("instance norm statistics and gradients") {
  auto x = random_tensor<double>({3, 4, 5}, 12, -2, 3);
  std::vector<double> scale{1.5, 0.5, 2.0}, shift{0.1, -0.3, 0.7};
  nn::InstanceNormCtx<double> ctx;
  auto y = nn::instance_norm_forward(x, scale, shift, 1e-5, ctx);
  for (int c = 0; c < 3; ++c) {
    double m = 0, v = 0;
    for (int i = 0; i < 20; ++i) m += y[c * 20 + i];
    m /= 20;
    for (int i = 0; i < 20; ++i) v += (y[c * 20 + i] - m) * (y[c * 20 + i] - m);
    v /= 20;
    CHECK(m == doctest::Approx(shift[c]).epsilon(1e-9));
    CHECK(std::sqrt(v) == doctest::Approx(scale[c]).epsilon(1e-4));
  }
  auto r = random_tensor<double>({3, 4, 5}, 13);
  std::vector<double> ds, dsh;
  auto dx = nn::instance_norm_backward(ctx, r, ds, dsh);
  auto loss = [&] {
    nn::InstanceNormCtx<double> c2;
    return dot(nn::instance_norm_forward(x, scale, shift, 1e-5, c2), r);
  };
  for (int64_t i = 0; i < x.size(); ++i) {
    const double o = x[i];
    x[i] = o + 1e-6;
    const double up = loss();
    x[i] = o - 1e-6;
    const double dn = loss();
    x[i] = o;
    CHECK(dx[i] == doctest::Approx((up - dn) / 2e-6).epsilon(1e-5));
  }
  for (int c = 0; c < 3; ++c) {
    const double o = scale[c];
    scale[c] = o + 1e-6;
    const double up = loss();
    scale[c] = o - 1e-6;
    const double dn = loss();
    scale[c] = o;
    CHECK(ds[c] == doctest::Approx((up - dn) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("instance norm of a standardized map with identity statistics is the identity") {
  Tensor<double> f({1, 2, 2});
  f[0] = -1;
  f[1] = 1;
  f[2] = -1;
  f[3] = 1;
  nn::InstanceNormCtx<double> ctx;
  auto y = nn::instance_norm_forward(f, {1.0}, {0.0}, 1e-5, ctx);
  for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(f[i]).epsilon(1e-5));
}
