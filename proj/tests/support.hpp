// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "enerv/nn.hpp"
#include "enerv/tensor.hpp"

namespace enerv::testing {

template <typename T>
Tensor<T> random_tensor(Shape shape, uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.span()) v = static_cast<T>(d(rng));
  return t;
}

template <typename T>
double dot(const Tensor<T>& a, const Tensor<T>& b) {
  double s = 0;
  for (int64_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

/// Worst relative error between analytic and central-difference gradients
/// over the parameters of `ps`, probing up to `per_param` entries each.
/// `loss` re-evaluates the objective from the current parameter values;
/// analytic gradients must already be in ps[i].grad.
struct GradReport {
  double worst = 0;
  std::string where;
};

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-4}); }

inline GradReport compare_gradients(nn::ParamStore<double>& ps, const std::function<double()>& loss, double step,
                                    int per_param, uint64_t seed) {
  GradReport r;
  std::mt19937_64 rng(seed);
  for (auto& p : ps.all()) {
    const int64_t n = p.value.size();
    const int probes = static_cast<int>(std::min<int64_t>(n, per_param));
    for (int j = 0; j < probes; ++j) {
      const int64_t i = probes == n ? j : static_cast<int64_t>(rng() % static_cast<uint64_t>(n));
      const double orig = p.value[i];
      p.value[i] = orig + step;
      const double up = loss();
      p.value[i] = orig - step;
      const double dn = loss();
      p.value[i] = orig;
      const double fd = (up - dn) / (2 * step);
      const double e = rel_err(p.grad[i], fd);
      if (e > r.worst) {
        r.worst = e;
        r.where = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return r;
}

}  // namespace enerv::testing
