// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "enerv/errors.hpp"
#include "enerv/kernels.hpp"

namespace enerv {

namespace kn = enerv::kernels;

double psnr(const float* a, const float* b, int64_t n) {
  if (n <= 0) throw std::invalid_argument("psnr of an empty signal");
  double se = 0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    se += d * d;
  }
  if (se == 0) return kPsnrInf;
  return 10.0 * std::log10(static_cast<double>(n) / se);
}

double psnr(const Tensor<float>& a, const Tensor<float>& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("psnr: shape mismatch " + shape_to_string(a.shape()) + " vs " +
                                shape_to_string(b.shape()));
  }
  return psnr(a.data(), b.data(), a.size());
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> g(static_cast<size_t>(size));
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    const double x = i - (size - 1) / 2.0;
    g[i] = std::exp(-(x * x) / (2 * sigma * sigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

int ssim_window_size(int64_t height, int64_t width) {
  const int64_t m = std::min(height, width);
  if (m >= 11) return 11;
  return static_cast<int>(m % 2 == 1 ? m : m - 1);
}

namespace {

constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr double kSigma = 1.5;
constexpr std::array<double, 5> kMsWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

// Valid separable correlation of an H x W plane.
template <typename T>
void blur(const T* src, int h, int w, const std::vector<T>& taps, std::vector<T>& tmp, T* dst) {
  const int n = static_cast<int>(taps.size());
  tmp.resize(static_cast<size_t>(h) * (w - n + 1));
  kn::filter_rows<T>(h, w, src, taps.data(), n, tmp.data());
  kn::filter_cols<T>(h, w - n + 1, tmp.data(), taps.data(), n, dst);
}

// Adjoint of blur for symmetric taps: zero-pad by n-1 and correlate again.
template <typename T>
void blur_adjoint(const T* g, int h, int w, const std::vector<T>& taps, std::vector<T>& pad, std::vector<T>& tmp,
                  T* dst) {
  const int n = static_cast<int>(taps.size());
  const int oh = h - n + 1, ow = w - n + 1;
  const int ph = h + n - 1, pw = w + n - 1;
  pad.assign(static_cast<size_t>(ph) * pw, T(0));
  for (int y = 0; y < oh; ++y) std::copy_n(g + static_cast<size_t>(y) * ow, ow, pad.data() + (y + n - 1) * pw + n - 1);
  blur(pad.data(), ph, pw, taps, tmp, dst);
}

struct PlaneStats {
  double ssim = 0;  // mean S
  double cs = 0;    // mean contrast-structure term
};

// Single-channel SSIM and CS in double precision, for the reference metric.
PlaneStats plane_ssim(const double* x, const double* y, int h, int w, const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int oh = h - n + 1, ow = w - n + 1;
  const size_t hw = static_cast<size_t>(h) * w, o = static_cast<size_t>(oh) * ow;
  std::vector<double> xx(hw), yy(hw), xy(hw), tmp;
  for (size_t i = 0; i < hw; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  std::vector<double> mx(o), my(o), exx(o), eyy(o), exy(o);
  blur(x, h, w, taps, tmp, mx.data());
  blur(y, h, w, taps, tmp, my.data());
  blur(xx.data(), h, w, taps, tmp, exx.data());
  blur(yy.data(), h, w, taps, tmp, eyy.data());
  blur(xy.data(), h, w, taps, tmp, exy.data());
  PlaneStats s;
  for (size_t i = 0; i < o; ++i) {
    const double sx = exx[i] - mx[i] * mx[i], sy = eyy[i] - my[i] * my[i], sxy = exy[i] - mx[i] * my[i];
    const double cs = (2 * sxy + kC2) / (sx + sy + kC2);
    const double l = (2 * mx[i] * my[i] + kC1) / (mx[i] * mx[i] + my[i] * my[i] + kC1);
    s.cs += cs;
    s.ssim += l * cs;
  }
  s.cs /= static_cast<double>(o);
  s.ssim /= static_cast<double>(o);
  return s;
}

// 2x2 average pooling with zero padding of one on odd axes, divisor always 4.
std::vector<double> downsample(const std::vector<double>& src, int h, int w, int& oh, int& ow) {
  const int py = h % 2, px = w % 2;
  oh = (h + 2 * py - 2) / 2 + 1;
  ow = (w + 2 * px - 2) / 2 + 1;
  std::vector<double> out(static_cast<size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int iy = 2 * y + dy - py, ix = 2 * x + dx - px;
          if (iy >= 0 && iy < h && ix >= 0 && ix < w) s += src[static_cast<size_t>(iy) * w + ix];
        }
      }
      out[static_cast<size_t>(y) * ow + x] = s / 4.0;
    }
  }
  return out;
}

}  // namespace

template <typename T>
double ssim(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>* grad) {
  if (a.shape() != b.shape() || a.rank() != 3) {
    throw std::invalid_argument("ssim: expected matching C x H x W images, got " + shape_to_string(a.shape()) +
                                " and " + shape_to_string(b.shape()));
  }
  const int c = static_cast<int>(a.dim(0)), h = static_cast<int>(a.dim(1)), w = static_cast<int>(a.dim(2));
  const int n = ssim_window_size(h, w);
  if (n < 1) throw std::invalid_argument("ssim: empty image");
  std::vector<T> taps;
  for (double v : gaussian_window(n, kSigma)) taps.push_back(static_cast<T>(v));
  const int oh = h - n + 1, ow = w - n + 1;
  const size_t hw = static_cast<size_t>(h) * w, o = static_cast<size_t>(oh) * ow;
  const double inv_count = 1.0 / (static_cast<double>(o) * c);
  if (grad) *grad = Tensor<T>(a.shape());

  std::vector<T> xx(hw), yy(hw), xy(hw), tmp, pad;
  std::vector<T> mx(o), my(o), exx(o), eyy(o), exy(o), gm(o), gxx(o), gxy(o), p(hw), q(hw), r(hw);
  double total = 0;
  for (int ch = 0; ch < c; ++ch) {
    const T* x = a.data() + ch * hw;
    const T* y = b.data() + ch * hw;
    for (size_t i = 0; i < hw; ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    blur(x, h, w, taps, tmp, mx.data());
    blur(y, h, w, taps, tmp, my.data());
    blur(xx.data(), h, w, taps, tmp, exx.data());
    blur(yy.data(), h, w, taps, tmp, eyy.data());
    blur(xy.data(), h, w, taps, tmp, exy.data());
    for (size_t i = 0; i < o; ++i) {
      const double ux = mx[i], uy = my[i];
      const double a1 = 2 * ux * uy + kC1;
      const double a2 = 2 * (exy[i] - ux * uy) + kC2;
      const double b1 = ux * ux + uy * uy + kC1;
      const double b2 = (exx[i] - ux * ux) + (eyy[i] - uy * uy) + kC2;
      const double s = a1 * a2 / (b1 * b2);
      total += s;
      if (grad) {
        const double d = b1 * b2;
        gm[i] = static_cast<T>(inv_count * (2 * uy * (a2 - a1) / d - 2 * ux * s / b1 + 2 * ux * s / b2));
        gxx[i] = static_cast<T>(inv_count * (-s / b2));
        gxy[i] = static_cast<T>(inv_count * (2 * a1 / d));
      }
    }
    if (grad) {
      blur_adjoint(gm.data(), h, w, taps, pad, tmp, p.data());
      blur_adjoint(gxx.data(), h, w, taps, pad, tmp, q.data());
      blur_adjoint(gxy.data(), h, w, taps, pad, tmp, r.data());
      T* g = grad->data() + ch * hw;
      for (size_t i = 0; i < hw; ++i) g[i] = p[i] + T(2) * x[i] * q[i] + y[i] * r[i];
    }
  }
  return total * inv_count;
}

template double ssim<float>(const Tensor<float>&, const Tensor<float>&, Tensor<float>*);
template double ssim<double>(const Tensor<double>&, const Tensor<double>&, Tensor<double>*);

int ms_ssim_scales(int64_t height, int64_t width) {
  const int64_t m = std::min(height, width);
  int n = 0;
  while (n < 5 && m >= (int64_t{1} << n) * 11) ++n;
  return n;
}

double ms_ssim(const Tensor<float>& a, const Tensor<float>& b) {
  if (a.shape() != b.shape() || a.rank() != 3) {
    throw std::invalid_argument("ms_ssim: expected matching C x H x W images");
  }
  const int c = static_cast<int>(a.dim(0));
  const int h0 = static_cast<int>(a.dim(1)), w0 = static_cast<int>(a.dim(2));
  const int levels = ms_ssim_scales(h0, w0);
  if (levels < 1) {
    throw ConfigError("ms_ssim: " + std::to_string(h0) + "x" + std::to_string(w0) + 
                      " is smaller than one 11x11 window");
  }
  double wsum = 0;
  for (int i = 0; i < levels; ++i) wsum += kMsWeights[i];
  const std::vector<double> taps = gaussian_window(11, kSigma);
  double total = 0;
  for (int ch = 0; ch < c; ++ch) {
    const size_t hw = static_cast<size_t>(h0) * w0;
    std::vector<double> x(a.data() + ch * hw, a.data() + (ch + 1) * hw);
    std::vector<double> y(b.data() + ch * hw, b.data() + (ch + 1) * hw);
    int h = h0, w = w0;
    double prod = 1;
    for (int level = 0; level < levels; ++level) {
      const PlaneStats s = plane_ssim(x.data(), y.data(), h, w, taps);
      const double wt = kMsWeights[level] / wsum;
      if (level + 1 < levels) {
        prod *= std::pow(std::max(s.cs, 0.0), wt);
        int nh = 0, nw = 0;
        x = downsample(x, h, w, nh, nw);
        y = downsample(y, h, w, nh, nw);
        h = nh;
        w = nw;
      } else {
        prod *= std::pow(std::max(s.ssim, 0.0), wt);
      }
    }
    total += prod;
  }
  return total / c;
}

// ------------------------------------------------------------------ reports

void EvalReport::recompute() {
  auto agg = [&](std::optional<Split> which) {
    Aggregate g;
    for (const auto& r : rows) {
      if (which && r.split != which) continue;
      ++g.frames;
      g.psnr += std::min(r.psnr, kPsnrCap);
      g.ms_ssim += r.ms_ssim;
    }
    if (g.frames > 0) {
      g.psnr /= static_cast<double>(g.frames);
      g.ms_ssim /= static_cast<double>(g.frames);
    }
    return g;
  };
  overall = agg(std::nullopt);
  const bool split = std::any_of(rows.begin(), rows.end(), [](const FrameScore& r) { return r.split.has_value(); });
  seen.reset();
  unseen.reset();
  if (split) {
    seen = agg(Split::kSeen);
    unseen = agg(Split::kUnseen);
  }
}

namespace {

std::string fmt_psnr(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string EvalReport::csv() const {
  std::ostringstream os;
  os << "index,t,split,psnr,ms_ssim\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%s,%s,%.6f\n", static_cast<long long>(r.index), r.t,
                  r.split ? std::string(split_name(*r.split)).c_str() : "all", fmt_psnr(r.psnr).c_str(), r.ms_ssim);
    os << buf;
  }
  return os.str();
}

std::string EvalReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %7s %8s %10s\n", "subset", "frames", "psnr", "ms-ssim");
  os << buf;
  auto line = [&](const char* name, const Aggregate& g) {
    std::snprintf(buf, sizeof buf, "%-8s %7lld %8.2f %10.4f\n", name, static_cast<long long>(g.frames), g.psnr,
                  g.ms_ssim);
    os << buf;
  };
  line("all", overall);
  if (seen) line("seen", *seen);
  if (unseen) line("unseen", *unseen);
  std::snprintf(buf, sizeof buf, "(ms-ssim scales: %d; psnr capped at %.0f dB)\n", ms_ssim_scales, kPsnrCap);
  os << buf;
  return os.str();
}

EvalReport make_report(std::vector<FrameScore> rows, int scales) {
  EvalReport r;
  r.rows = std::move(rows);
  r.ms_ssim_scales = scales;
  r.recompute();
  return r;
}

EvalReport score_frames(const Tensor<float>& predicted, const FrameDataset& reference) {
  reference.validate();
  if (predicted.shape() != reference.frames.shape()) {
    throw DataError("predicted frames " + shape_to_string(predicted.shape()) + " do not match dataset " +
                    shape_to_string(reference.frames.shape()));
  }
  const int64_t h = reference.height(), w = reference.width(), n = 3 * h * w;
  const int scales = ms_ssim_scales(h, w);
  std::vector<FrameScore> rows;
  for (int64_t k = 0; k < reference.num_frames(); ++k) {
    FrameScore s;
    s.index = k;
    s.t = reference.indices[k];
    if (reference.has_split()) s.split = reference.split[k];
    s.psnr = psnr(predicted.data() + k * n, reference.frame_data(k), n);
    if (scales > 0) {
      Tensor<float> p({3, h, w});
      std::copy_n(predicted.data() + k * n, n, p.data());
      s.ms_ssim = ms_ssim(p, reference.frame(k));
    }
    rows.push_back(s);
  }
  return make_report(std::move(rows), scales);
}

Tensor<float> render(const VideoINR<float>& model, const std::vector<double>& ts) {
  const int64_t h = model.config().out_h(), w = model.config().out_w();
  Tensor<float> out({static_cast<int64_t>(ts.size()), 3, h, w});
  typename VideoINR<float>::SpatialTape spatial;
  model.spatial_forward(spatial);
  for (size_t k = 0; k < ts.size(); ++k) {
    typename VideoINR<float>::FrameTape tape;
    const Tensor<float> f = model.frame_forward(spatial, ts[k], tape);
    std::copy_n(f.data(), f.size(), out.data() + static_cast<int64_t>(k) * f.size());
  }
  return out;
}

EvalReport evaluate(const VideoINR<float>& model, const FrameDataset& ds) {
  ds.validate();
  if (model.config().out_h() != ds.height() || model.config().out_w() != ds.width()) {
    throw DataError("model renders " + std::to_string(model.config().out_h()) + "x" +
                    std::to_string(model.config().out_w()) + " but the video is " + std::to_string(ds.height()) + "x" +
                    std::to_string(ds.width()));
  }
  return score_frames(render(model, ds.indices), ds);
}

}  // namespace enerv
