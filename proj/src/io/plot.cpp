// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/plot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "enerv/data.hpp"
#include "enerv/errors.hpp"

namespace enerv {

namespace {

// Each glyph is five rows of three bits, most significant bit on the left.
struct Glyph {
  char c;
  std::array<uint8_t, 5> rows;
};

constexpr Glyph kFont[] = {
    {'0', {7, 5, 5, 5, 7}}, {'1', {2, 6, 2, 2, 7}}, {'2', {7, 1, 7, 4, 7}}, {'3', {7, 1, 7, 1, 7}},
    {'4', {5, 5, 7, 1, 1}}, {'5', {7, 4, 7, 1, 7}}, {'6', {7, 4, 7, 5, 7}}, {'7', {7, 1, 1, 1, 1}},
    {'8', {7, 5, 7, 5, 7}}, {'9', {7, 5, 7, 1, 7}}, {'A', {2, 5, 7, 5, 5}}, {'B', {6, 5, 6, 5, 6}},
    {'C', {3, 4, 4, 4, 3}}, {'D', {6, 5, 5, 5, 6}}, {'E', {7, 4, 6, 4, 7}}, {'F', {7, 4, 6, 4, 4}},
    {'G', {3, 4, 5, 5, 3}}, {'H', {5, 5, 7, 5, 5}}, {'I', {7, 2, 2, 2, 7}}, {'J', {1, 1, 1, 5, 2}},
    {'K', {5, 5, 6, 5, 5}}, {'L', {4, 4, 4, 4, 7}}, {'M', {5, 7, 7, 5, 5}}, {'N', {6, 5, 5, 5, 5}},
    {'O', {2, 5, 5, 5, 2}}, {'P', {6, 5, 6, 4, 4}}, {'Q', {2, 5, 5, 6, 3}}, {'R', {6, 5, 6, 5, 5}},
    {'S', {3, 4, 2, 1, 6}}, {'T', {7, 2, 2, 2, 2}}, {'U', {5, 5, 5, 5, 7}}, {'V', {5, 5, 5, 5, 2}},
    {'W', {5, 5, 7, 7, 5}}, {'X', {5, 5, 2, 5, 5}}, {'Y', {5, 5, 2, 2, 2}}, {'Z', {7, 1, 2, 4, 7}},
    {'.', {0, 0, 0, 0, 2}}, {'-', {0, 0, 7, 0, 0}}, {'+', {0, 2, 7, 2, 0}}, {'_', {0, 0, 0, 0, 7}},
    {'(', {1, 2, 2, 2, 1}}, {')', {4, 2, 2, 2, 4}}, {'/', {1, 1, 2, 4, 4}}, {':', {0, 2, 0, 2, 0}},
    {'%', {5, 1, 2, 4, 5}}, {'=', {0, 7, 0, 7, 0}},
};

const Glyph* find_glyph(char c) {
  c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kFont) {
    if (g.c == c) return &g;
  }
  return nullptr;
}

using Rgb = std::array<float, 3>;

constexpr Rgb kPalette[] = {{0.12f, 0.47f, 0.71f}, {0.84f, 0.15f, 0.16f}, {0.17f, 0.63f, 0.17f},
                            {1.00f, 0.50f, 0.05f}, {0.58f, 0.40f, 0.74f}, {0.55f, 0.34f, 0.29f}};

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), img_({3, h, w}, 1.0f) {}

  void set(int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    for (int ch = 0; ch < 3; ++ch) img_[(static_cast<int64_t>(ch) * h_ + y) * w_ + x] = c[ch];
  }

  void rect(int x0, int y0, int x1, int y1, const Rgb& c) {
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) set(x, y, c);
  }

  void line(double x0, double y0, double x1, double y1, const Rgb& c, int thick = 1) {
    const int steps = static_cast<int>(std::max(std::fabs(x1 - x0), std::fabs(y1 - y0))) + 1;
    for (int i = 0; i <= steps; ++i) {
      const double a = static_cast<double>(i) / steps;
      const int x = static_cast<int>(std::lround(x0 + a * (x1 - x0)));
      const int y = static_cast<int>(std::lround(y0 + a * (y1 - y0)));
      rect(x - thick / 2, y - thick / 2, x + (thick - 1) / 2, y + (thick - 1) / 2, c);
    }
  }

  /// Draws text with its top-left corner at (x, y); returns the advance in pixels.
  int text(int x, int y, std::string_view s, const Rgb& c, int scale = 2, bool vertical = false) {
    int pos = 0;
    for (const char ch : s) {
      if (const Glyph* g = find_glyph(ch)) {
        for (int r = 0; r < 5; ++r) {
          for (int b = 0; b < 3; ++b) {
            if (!(g->rows[r] & (4 >> b))) continue;
            for (int dy = 0; dy < scale; ++dy) {
              for (int dx = 0; dx < scale; ++dx) {
                if (vertical) {
                  set(x + r * scale + dy, y - (pos + b * scale + dx), c);
                } else {
                  set(x + pos + b * scale + dx, y + r * scale + dy, c);
                }
              }
            }
          }
        }
      }
      pos += 4 * scale;
    }
    return pos;
  }

  static int text_width(std::string_view s, int scale = 2) { return static_cast<int>(s.size()) * 4 * scale; }

  const Tensor<float>& image() const { return img_; }

 private:
  int w_, h_;
  Tensor<float> img_;
};

std::string tick_label(double v, double step) {
  char buf[32];
  const int digits = step >= 1 ? 0 : std::min(4, static_cast<int>(std::ceil(-std::log10(step))));
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const std::vector<PlotSeries>& series, std::string_view title,
                     std::string_view x_label, std::string_view y_label, int width, int height) {
  if (width < 160 || height < 120) throw ConfigError("plot size too small");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("plot series '" + s.label + "' has mismatched x/y");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  Canvas cv(width, height);
  const Rgb black{0, 0, 0}, grid{0.88f, 0.88f, 0.88f};
  const int left = 70, right = width - 20, top = 36, bottom = height - 46;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (right - left); };
  auto py = [&](double y) { return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top); };

  const double xs = nice_step(x_hi - x_lo, 6), ys = nice_step(y_hi - y_lo, 5);
  for (double v = std::ceil(x_lo / xs) * xs; v <= x_hi + 1e-9 * xs; v += xs) {
    const int x = static_cast<int>(std::lround(px(v)));
    cv.line(x, top, x, bottom, grid);
    const std::string s = tick_label(v, xs);
    cv.text(x - Canvas::text_width(s) / 2, bottom + 6, s, black);
  }
  for (double v = std::ceil(y_lo / ys) * ys; v <= y_hi + 1e-9 * ys; v += ys) {
    const int y = static_cast<int>(std::lround(py(v)));
    cv.line(left, y, right, y, grid);
    const std::string s = tick_label(v, ys);
    cv.text(left - 6 - Canvas::text_width(s), y - 5, s, black);
  }
  cv.line(left, top, left, bottom, black);
  cv.line(left, bottom, right, bottom, black);
  cv.text((width - Canvas::text_width(title)) / 2, 10, title, black);
  cv.text((left + right - Canvas::text_width(x_label)) / 2, height - 20, x_label, black);
  cv.text(8, (top + bottom + Canvas::text_width(y_label)) / 2, y_label, black, 2, true);

  int legend_y = top + 6;
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const Rgb& c = kPalette[k % std::size(kPalette)];
    for (size_t i = 0; i + 1 < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(s.y[i + 1])) continue;
      cv.line(px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), c, 2);
    }
    if (s.x.size() <= 64) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        const int x = static_cast<int>(std::lround(px(s.x[i]))), y = static_cast<int>(std::lround(py(s.y[i])));
        cv.rect(x - 2, y - 2, x + 2, y + 2, c);
      }
    }
    const int lx = right - 12 - Canvas::text_width(s.label) - 18;
    cv.rect(lx, legend_y + 3, lx + 12, legend_y + 6, c);
    cv.text(lx + 18, legend_y, s.label, black);
    legend_y += 16;
  }
  write_png(path, cv.image());
}

}  // namespace enerv
