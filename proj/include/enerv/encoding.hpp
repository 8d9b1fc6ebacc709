// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <span>
#include <vector>

#include "enerv/tensor.hpp"

namespace enerv {

/// Frequency positional encoding gamma(x) = (sin(b^0 pi x), cos(b^0 pi x), ...,
/// sin(b^{l-1} pi x), cos(b^{l-1} pi x)).
struct FreqEncodingSpec {
  double base = 1.25;
  int levels = 80;

  void validate() const;  // throws ConfigError
  int dim() const { return 2 * levels; }
  bool operator==(const FreqEncodingSpec&) const = default;
};

/// Writes spec.dim() values for a scalar x in [0,1].
template <typename T>
void positional_encode_into(double x, const FreqEncodingSpec& spec, T* out);

template <typename T>
std::vector<T> positional_encode(double x, const FreqEncodingSpec& spec);

/// Row-wise encoding of several scalars: returns n x spec.dim().
template <typename T>
Tensor<T> positional_encode(std::span<const double> xs, const FreqEncodingSpec& spec);

/// Endpoint-inclusive normalized grid. coords is 2 x h x w with channel 0 the
/// column coordinate j/(w-1) and channel 1 the row coordinate i/(h-1).
struct CoordGrid {
  int height = 0;
  int width = 0;
  Tensor<double> coords;
};

CoordGrid make_grid(int height, int width);

/// (4*levels) x h x w: per location, gamma(x) followed by gamma(y).
template <typename T>
Tensor<T> encode_grid(const CoordGrid& grid, const FreqEncodingSpec& spec);

}  // namespace enerv
