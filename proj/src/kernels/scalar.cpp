// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <cmath>
#include <vector>

#include "enerv/kernels.hpp"

namespace enerv::kernels::ref {

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc) {
  std::vector<T> row(static_cast<size_t>(n));
  for (int i = 0; i < m; ++i) {
    std::fill(row.begin(), row.end(), T(0));
    for (int p = 0; p < k; ++p) {
      const T av = trans_a ? a[static_cast<int64_t>(p) * lda + i] : a[static_cast<int64_t>(i) * lda + p];
      if (av == T(0)) continue;
      if (trans_b) {
        for (int j = 0; j < n; ++j) row[j] += av * b[static_cast<int64_t>(j) * ldb + p];
      } else {
        const T* brow = b + static_cast<int64_t>(p) * ldb;
        for (int j = 0; j < n; ++j) row[j] += av * brow[j];
      }
    }
    T* crow = c + static_cast<int64_t>(i) * ldc;
    if (beta == T(0)) {
      for (int j = 0; j < n; ++j) crow[j] = alpha * row[j];
    } else {
      for (int j = 0; j < n; ++j) crow[j] = alpha * row[j] + beta * crow[j];
    }
  }
}

template <typename T>
void axpy(int64_t n, T alpha, const T* x, T* y) {
  for (int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void gelu_forward(int64_t n, const T* x, T* y) {
  constexpr T kInvSqrt2 = T(0.70710678118654752440);
  for (int64_t i = 0; i < n; ++i) y[i] = T(0.5) * x[i] * (T(1) + std::erf(x[i] * kInvSqrt2));
}

template <typename T>
void gelu_backward(int64_t n, const T* x, const T* dy, T* dx) {
  constexpr T kInvSqrt2 = T(0.70710678118654752440);
  constexpr T kInvSqrt2Pi = T(0.39894228040143267794);
  for (int64_t i = 0; i < n; ++i) {
    const T cdf = T(0.5) * (T(1) + std::erf(x[i] * kInvSqrt2));
    const T pdf = kInvSqrt2Pi * std::exp(T(-0.5) * x[i] * x[i]);
    dx[i] = dy[i] * (cdf + x[i] * pdf);
  }
}

template <typename T>
void filter_rows(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst) {
  const int out_cols = cols - ntaps + 1;
  for (int r = 0; r < rows; ++r) {
    const T* s = src + static_cast<int64_t>(r) * cols;
    T* d = dst + static_cast<int64_t>(r) * out_cols;
    for (int c = 0; c < out_cols; ++c) {
      T acc = 0;
      for (int t = 0; t < ntaps; ++t) acc += taps[t] * s[c + t];
      d[c] = acc;
    }
  }
}

template <typename T>
void filter_cols(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst) {
  const int out_rows = rows - ntaps + 1;
  for (int r = 0; r < out_rows; ++r) {
    T* d = dst + static_cast<int64_t>(r) * cols;
    for (int c = 0; c < cols; ++c) d[c] = 0;
    for (int t = 0; t < ntaps; ++t) {
      const T* s = src + static_cast<int64_t>(r + t) * cols;
      for (int c = 0; c < cols; ++c) d[c] += taps[t] * s[c];
    }
  }
}

void adam_step(int64_t n, float* w, const float* g, float* m, float* v, const AdamCoeffs& c) {
  const float one_b1 = 1.0f - c.beta1;
  const float one_b2 = 1.0f - c.beta2;
  for (int64_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + one_b1 * g[i];
    v[i] = c.beta2 * v[i] + one_b2 * (g[i] * g[i]);
    const float denom = std::sqrt(v[i]) * c.inv_sqrt_bc2 + c.eps;
    w[i] = w[i] - c.lr * (m[i] / denom);
  }
}

#define ENERV_INSTANTIATE_REF(T)                                                                                  \
  template void gemm<T>(bool, bool, int, int, int, T, const T*, int, const T*, int, T, T*, int);                \
  template void axpy<T>(int64_t, T, const T*, T*);                                                              \
  template void gelu_forward<T>(int64_t, const T*, T*);                                                         \
  template void gelu_backward<T>(int64_t, const T*, const T*, T*);                                              \
  template void filter_rows<T>(int, int, const T*, const T*, int, T*);                                          \
  template void filter_cols<T>(int, int, const T*, const T*, int, T*);

ENERV_INSTANTIATE_REF(float)
ENERV_INSTANTIATE_REF(double)
#undef ENERV_INSTANTIATE_REF

}  // namespace enerv::kernels::ref
