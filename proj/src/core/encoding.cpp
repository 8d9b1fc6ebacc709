// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include "enerv/encoding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "enerv/errors.hpp"

namespace enerv {

void FreqEncodingSpec::validate() const {
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw ConfigError("positional encoding base must be > 1, got " + std::to_string(base));
  }
  if (levels < 1) throw ConfigError("positional encoding levels must be >= 1, got " + std::to_string(levels));
}

template <typename T>
void positional_encode_into(double x, const FreqEncodingSpec& spec, T* out) {
  spec.validate();
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ConfigError("positional encoding input must lie in [0,1], got " + std::to_string(x));
  }
  for (int k = 0; k < spec.levels; ++k) {
    const double arg = std::pow(spec.base, k) * std::numbers::pi * x;
    out[2 * k] = static_cast<T>(std::sin(arg));
    out[2 * k + 1] = static_cast<T>(std::cos(arg));
  }
}

template <typename T>
std::vector<T> positional_encode(double x, const FreqEncodingSpec& spec) {
  std::vector<T> out(static_cast<size_t>(std::max(spec.dim(), 0)));
  positional_encode_into<T>(x, spec, out.data());
  return out;
}

template <typename T>
Tensor<T> positional_encode(std::span<const double> xs, const FreqEncodingSpec& spec) {
  spec.validate();
  Tensor<T> out({static_cast<int64_t>(xs.size()), spec.dim()});
  for (size_t i = 0; i < xs.size(); ++i) positional_encode_into<T>(xs[i], spec, out.data() + i * spec.dim());
  return out;
}

CoordGrid make_grid(int height, int width) {
  if (height < 2 || width < 2) {
    throw ConfigError("coordinate grid needs h >= 2 and w >= 2, got " + std::to_string(height) + "x" +
                      std::to_string(width));
  }
  CoordGrid g;
  g.height = height;
  g.width = width;
  g.coords = Tensor<double>({2, height, width});
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      g.coords.at(0, i, j) = static_cast<double>(j) / (width - 1);
      g.coords.at(1, i, j) = static_cast<double>(i) / (height - 1);
    }
  }
  return g;
}

template <typename T>
Tensor<T> encode_grid(const CoordGrid& grid, const FreqEncodingSpec& spec) {
  spec.validate();
  const int d = spec.dim();
  const int h = grid.height, w = grid.width;
  Tensor<T> out({2 * static_cast<int64_t>(d), h, w});
  std::vector<T> buf(static_cast<size_t>(d));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int axis = 0; axis < 2; ++axis) {
        positional_encode_into<T>(grid.coords.at(axis, i, j), spec, buf.data());
        for (int c = 0; c < d; ++c) out.at(axis * d + c, i, j) = buf[c];
      }
    }
  }
  return out;
}

template void positional_encode_into<float>(double, const FreqEncodingSpec&, float*);
template void positional_encode_into<double>(double, const FreqEncodingSpec&, double*);
template std::vector<float> positional_encode<float>(double, const FreqEncodingSpec&);
template std::vector<double> positional_encode<double>(double, const FreqEncodingSpec&);
template Tensor<float> positional_encode<float>(std::span<const double>, const FreqEncodingSpec&);
template Tensor<double> positional_encode<double>(std::span<const double>, const FreqEncodingSpec&);
template Tensor<float> encode_grid<float>(const CoordGrid&, const FreqEncodingSpec&);
template Tensor<double> encode_grid<double>(const CoordGrid&, const FreqEncodingSpec&);

}  // namespace enerv
