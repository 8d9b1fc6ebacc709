// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "enerv/errors.hpp"
#include "enerv/metrics.hpp"
#include "support.hpp"

using namespace enerv;
using enerv::testing::random_tensor;

namespace {

// Direct 2-d reference: explicit window sums, no separable filtering, no kernel table.
struct RefStats {
  double ssim = 0;
  double cs = 0;
};

RefStats ref_plane(const std::vector<double>& x, const std::vector<double>& y, int h, int w, int win) {
  const std::vector<double> g1 = gaussian_window(win, 1.5);
  const double c1 = 1e-4, c2 = 9e-4;
  double s_sum = 0, cs_sum = 0;
  int count = 0;
  for (int i = 0; i + win <= h; ++i) {
    for (int j = 0; j + win <= w; ++j) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int a = 0; a < win; ++a) {
        for (int b = 0; b < win; ++b) {
          const double wt = g1[a] * g1[b];
          const double u = x[(i + a) * w + j + b], v = y[(i + a) * w + j + b];
          mx += wt * u;
          my += wt * v;
          xx += wt * u * u;
          yy += wt * v * v;
          xy += wt * u * v;
        }
      }
      const double sx = xx - mx * mx, sy = yy - my * my, sxy = xy - mx * my;
      const double cs = (2 * sxy + c2) / (sx + sy + c2);
      s_sum += (2 * mx * my + c1) / (mx * mx + my * my + c1) * cs;
      cs_sum += cs;
      ++count;
    }
  }
  return {s_sum / count, cs_sum / count};
}

double ref_ssim(const Tensor<float>& a, const Tensor<float>& b) {
  const int c = static_cast<int>(a.dim(0)), h = static_cast<int>(a.dim(1)), w = static_cast<int>(a.dim(2));
  double total = 0;
  for (int ch = 0; ch < c; ++ch) {
    std::vector<double> x(h * w), y(h * w);
    for (int i = 0; i < h * w; ++i) {
      x[i] = a[ch * h * w + i];
      y[i] = b[ch * h * w + i];
    }
    total += ref_plane(x, y, h, w, ssim_window_size(h, w)).ssim;
  }
  return total / c;
}

// avg_pool2d(kernel 2, stride 2, padding h%2 / w%2 on both sides, zeros counted)
std::vector<double> ref_pool(const std::vector<double>& s, int h, int w, int& oh, int& ow) {
  const int py = h % 2, px = w % 2, ph = h + 2 * py, pw = w + 2 * px;
  std::vector<double> padded(ph * pw, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) padded[(y + py) * pw + x + px] = s[y * w + x];
  oh = ph / 2;
  ow = pw / 2;
  std::vector<double> out(oh * ow);
  for (int i = 0; i < oh; ++i)
    for (int j = 0; j < ow; ++j)
      out[i * ow + j] = (padded[2 * i * pw + 2 * j] + padded[2 * i * pw + 2 * j + 1] +
                         padded[(2 * i + 1) * pw + 2 * j] + padded[(2 * i + 1) * pw + 2 * j + 1]) / 4;
  return out;
}

double ref_ms_ssim(const Tensor<float>& a, const Tensor<float>& b) {
  const double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  const int c = static_cast<int>(a.dim(0)), h0 = static_cast<int>(a.dim(1)), w0 = static_cast<int>(a.dim(2));
  const int n = ms_ssim_scales(h0, w0);
  double wsum = 0;
  for (int i = 0; i < n; ++i) wsum += weights[i];
  double total = 0;
  for (int ch = 0; ch < c; ++ch) {
    std::vector<double> x(h0 * w0), y(h0 * w0);
    for (int i = 0; i < h0 * w0; ++i) {
      x[i] = a[ch * h0 * w0 + i];
      y[i] = b[ch * h0 * w0 + i];
    }
    int h = h0, w = w0;
    double prod = 1;
    for (int s = 0; s < n; ++s) {
      const RefStats st = ref_plane(x, y, h, w, 11);
      const double v = s + 1 == n ? std::max(st.ssim, 0.0) : std::max(st.cs, 0.0);
      prod *= std::pow(v, weights[s] / wsum);
      if (s + 1 < n) {
        int oh, ow;
        x = ref_pool(x, h, w, oh, ow);
        y = ref_pool(y, h, w, oh, ow);
        h = oh;
        w = ow;
      }
    }
    total += prod;
  }
  return total / c;
}

Tensor<float> smooth_image(int h, int w, uint64_t seed) {
  Tensor<float> t({3, h, w});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 6.28);
  for (int c = 0; c < 3; ++c) {
    const double p = u(rng), q = u(rng);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        t[(c * h + y) * w + x] = static_cast<float>(0.5 + 0.3 * std::sin(0.21 * x + p) * std::cos(0.13 * y + q) +
                                                    0.1 * std::sin(0.9 * x * y / (h + w)));
  }
  return t;
}

}  // namespace

TEST_CASE("psnr examples") {
  Tensor<float> a({3, 8, 8}, 0.3f), b({3, 8, 8}, 0.4f), c({3, 8, 8}, 0.8f);
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(psnr(a, c) == doctest::Approx(10 * std::log10(4.0)).epsilon(1e-6));
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);
  CHECK_THROWS(psnr(a, Tensor<float>({3, 8, 9})));
}

TEST_CASE("psnr strictly decreases with noise amplitude") {
  const Tensor<float> img = smooth_image(32, 32, 1);
  const Tensor<float> noise = random_tensor<float>({3, 32, 32}, 9, -1, 1);
  double prev = kPsnrInf;
  for (const double amp : {0.01, 0.02, 0.05, 0.1}) {
    Tensor<float> n = img;
    for (int64_t i = 0; i < n.size(); ++i) n[i] += static_cast<float>(amp * noise[i]);
    const double p = psnr(img, n);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim matches the direct reference") {
  const Tensor<float> a = smooth_image(24, 30, 2);
  Tensor<float> b = a;
  const Tensor<float> noise = random_tensor<float>({3, 24, 30}, 3, -0.1, 0.1);
  for (int64_t i = 0; i < b.size(); ++i) b[i] += noise[i];
  CHECK(ssim(a, b) == doctest::Approx(ref_ssim(a, b)).epsilon(1e-5));
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-6));
  // windows shrink below 11 pixels
  CHECK(ssim_window_size(8, 40) == 7);
  CHECK(ssim_window_size(9, 40) == 9);
  const Tensor<float> s1 = smooth_image(8, 12, 4), s2 = smooth_image(8, 12, 5);
  CHECK(ssim(s1, s2) == doctest::Approx(ref_ssim(s1, s2)).epsilon(1e-5));
}

TEST_CASE("ssim gradient matches finite differences") {
  const int h = 13, w = 15;
  Tensor<double> a({3, h, w}), b({3, h, w});
  const auto ra = random_tensor<double>({3, h, w}, 5, 0.2, 0.8), rb = random_tensor<double>({3, h, w}, 6, 0.2, 0.8);
  for (int64_t i = 0; i < a.size(); ++i) {
    a[i] = ra[i];
    b[i] = 0.5 * ra[i] + 0.5 * rb[i];
  }
  Tensor<double> g;
  ssim(a, b, &g);
  double worst = 0;
  for (int64_t i = 0; i < a.size(); i += 7) {
    const double orig = a[i];
    a[i] = orig + 1e-4;
    const double up = ssim(a, b);
    a[i] = orig - 1e-4;
    const double dn = ssim(a, b);
    a[i] = orig;
    const double fd = (up - dn) / 2e-4;
    worst = std::max(worst, std::fabs(fd - g[i]) / std::max({std::fabs(fd), std::fabs(g[i]), 1e-6}));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("ms-ssim scale count") {
  CHECK(ms_ssim_scales(720, 1280) == 5);
  CHECK(ms_ssim_scales(176, 200) == 5);
  CHECK(ms_ssim_scales(175, 200) == 4);
  CHECK(ms_ssim_scales(64, 128) == 3);
  CHECK(ms_ssim_scales(11, 11) == 1);
  CHECK(ms_ssim_scales(10, 40) == 0);
  CHECK_THROWS_AS(ms_ssim(Tensor<float>({3, 10, 10}), Tensor<float>({3, 10, 10})), ConfigError);
}

TEST_CASE("ms-ssim against the direct reference") {
  for (const auto& [h, w] : {std::pair{64, 96}, std::pair{45, 50}, std::pair{23, 23}}) {
    const Tensor<float> a = smooth_image(h, w, 7);
    Tensor<float> b = a;
    const Tensor<float> noise = random_tensor<float>({3, h, w}, 8, -0.15, 0.15);
    for (int64_t i = 0; i < b.size(); ++i) b[i] = std::clamp(b[i] + noise[i], 0.0f, 1.0f);
    CHECK(ms_ssim(a, b) == doctest::Approx(ref_ms_ssim(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("ms-ssim properties") {
  const Tensor<float> a = smooth_image(64, 64, 11), b = smooth_image(64, 64, 12);
  CHECK(ms_ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(ms_ssim(a, b) == ms_ssim(b, a));

  const auto u1 = random_tensor<float>({3, 256, 256}, 21, 0, 1), u2 = random_tensor<float>({3, 256, 256}, 22, 0, 1);
  CHECK(ms_ssim(u1, u2) < 0.2);

  // A one-pixel shift keeps more structure than scrambling the rows.
  const int h = 96, w = 96;
  const Tensor<float> img = smooth_image(h, w, 13);
  Tensor<float> shifted = img, permuted = img;
  std::vector<int> rows(h);
  for (int i = 0; i < h; ++i) rows[i] = i;
  std::shuffle(rows.begin(), rows.end(), std::mt19937_64(14));
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        shifted[(c * h + y) * w + x] = img[(c * h + y) * w + std::max(0, x - 1)];
        permuted[(c * h + y) * w + x] = img[(c * h + rows[y]) * w + x];
      }
  CHECK(ms_ssim(img, shifted) > ms_ssim(img, permuted));
}

TEST_CASE("reports aggregate their rows") {
  std::vector<FrameScore> rows;
  for (int k = 0; k < 8; ++k) {
    FrameScore s;
    s.index = k;
    s.t = k / 7.0;
    s.split = k % 4 == 3 ? Split::kUnseen : Split::kSeen;
    s.psnr = k == 0 ? kPsnrInf : 20.0 + k;
    s.ms_ssim = 0.9 + 0.01 * k;
    rows.push_back(s);
  }
  const EvalReport r = make_report(rows, 3);
  REQUIRE(r.seen);
  REQUIRE(r.unseen);
  CHECK(r.overall.frames == 8);
  CHECK(r.seen->frames == 6);
  CHECK(r.unseen->frames == 2);
  CHECK(r.overall.psnr == doctest::Approx((100.0 + 21 + 22 + 23 + 24 + 25 + 26 + 27) / 8));
  CHECK(r.unseen->psnr == doctest::Approx((23.0 + 27.0) / 2));
  CHECK(r.csv().rfind("index,t,split,psnr,ms_ssim\n0,0,seen,inf,", 0) == 0);
  EvalReport copy = r;
  copy.recompute();
  CHECK(copy.overall.psnr == r.overall.psnr);
}
