// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors
//
// Built with -mavx2 -mfma. Nothing in here may be called unless the dispatcher
// has confirmed host support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "enerv/kernels.hpp"

namespace enerv::kernels::avx2 {
namespace {

// Register-blocked 6x16 micro-tile: 12 ymm accumulators, two B loads and six
// broadcasts per k step.
constexpr int kMR = 6;
constexpr int kNR = 16;
constexpr int kKC = 256;
constexpr int kMC = 96;
constexpr int kNC = 3072;

void pack_a(bool trans, const float* a, int lda, int i0, int mc, int p0, int kc, float* dst) {
  for (int ib = 0; ib < mc; ib += kMR) {
    const int rows = std::min(kMR, mc - ib);
    if (!trans) {
      const float* base = a + static_cast<int64_t>(i0 + ib) * lda + p0;
      for (int p = 0; p < kc; ++p) {
        int r = 0;
        for (; r < rows; ++r) dst[r] = base[static_cast<int64_t>(r) * lda + p];
        for (; r < kMR; ++r) dst[r] = 0.0f;
        dst += kMR;
      }
    } else {
      for (int p = 0; p < kc; ++p) {
        const float* src = a + static_cast<int64_t>(p0 + p) * lda + i0 + ib;
        int r = 0;
        for (; r < rows; ++r) dst[r] = src[r];
        for (; r < kMR; ++r) dst[r] = 0.0f;
        dst += kMR;
      }
    }
  }
}

void pack_b(bool trans, const float* b, int ldb, int p0, int kc, int j0, int nc, float* dst) {
  for (int jb = 0; jb < nc; jb += kNR) {
    const int cols = std::min(kNR, nc - jb);
    if (!trans) {
      for (int p = 0; p < kc; ++p) {
        const float* src = b + static_cast<int64_t>(p0 + p) * ldb + j0 + jb;
        if (cols == kNR) {
          _mm256_storeu_ps(dst, _mm256_loadu_ps(src));
          _mm256_storeu_ps(dst + 8, _mm256_loadu_ps(src + 8));
        } else {
          int c = 0;
          for (; c < cols; ++c) dst[c] = src[c];
          for (; c < kNR; ++c) dst[c] = 0.0f;
        }
        dst += kNR;
      }
    } else {
      for (int c = 0; c < kNR; ++c) {
        if (c < cols) {
          const float* src = b + static_cast<int64_t>(j0 + jb + c) * ldb + p0;
          for (int p = 0; p < kc; ++p) dst[p * kNR + c] = src[p];
        } else {
          for (int p = 0; p < kc; ++p) dst[p * kNR + c] = 0.0f;
        }
      }
      dst += static_cast<int64_t>(kc) * kNR;
    }
  }
}

inline void store_row(float* c, __m256 lo, __m256 hi, __m256 alpha, float beta) {
  lo = _mm256_mul_ps(lo, alpha);
  hi = _mm256_mul_ps(hi, alpha);
  if (beta != 0.0f) {
    const __m256 vb = _mm256_set1_ps(beta);
    lo = _mm256_fmadd_ps(vb, _mm256_loadu_ps(c), lo);
    hi = _mm256_fmadd_ps(vb, _mm256_loadu_ps(c + 8), hi);
  }
  _mm256_storeu_ps(c, lo);
  _mm256_storeu_ps(c + 8, hi);
}

void micro_kernel(int kc, const float* ap, const float* bp, float* c, int ldc, float alpha, float beta) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();
  for (int p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(bp);
    const __m256 b1 = _mm256_loadu_ps(bp + 8);
    __m256 a = _mm256_broadcast_ss(ap + 0);
    c00 = _mm256_fmadd_ps(a, b0, c00);
    c01 = _mm256_fmadd_ps(a, b1, c01);
    a = _mm256_broadcast_ss(ap + 1);
    c10 = _mm256_fmadd_ps(a, b0, c10);
    c11 = _mm256_fmadd_ps(a, b1, c11);
    a = _mm256_broadcast_ss(ap + 2);
    c20 = _mm256_fmadd_ps(a, b0, c20);
    c21 = _mm256_fmadd_ps(a, b1, c21);
    a = _mm256_broadcast_ss(ap + 3);
    c30 = _mm256_fmadd_ps(a, b0, c30);
    c31 = _mm256_fmadd_ps(a, b1, c31);
    a = _mm256_broadcast_ss(ap + 4);
    c40 = _mm256_fmadd_ps(a, b0, c40);
    c41 = _mm256_fmadd_ps(a, b1, c41);
    a = _mm256_broadcast_ss(ap + 5);
    c50 = _mm256_fmadd_ps(a, b0, c50);
    c51 = _mm256_fmadd_ps(a, b1, c51);
    ap += kMR;
    bp += kNR;
  }
  const __m256 va = _mm256_set1_ps(alpha);
  store_row(c + 0 * static_cast<int64_t>(ldc), c00, c01, va, beta);
  store_row(c + 1 * static_cast<int64_t>(ldc), c10, c11, va, beta);
  store_row(c + 2 * static_cast<int64_t>(ldc), c20, c21, va, beta);
  store_row(c + 3 * static_cast<int64_t>(ldc), c30, c31, va, beta);
  store_row(c + 4 * static_cast<int64_t>(ldc), c40, c41, va, beta);
  store_row(c + 5 * static_cast<int64_t>(ldc), c50, c51, va, beta);
}

void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda, const float* b,
           int ldb, float beta, float* c, int ldc) {
  if (m <= 0 || n <= 0) return;
  if (k <= 0) {
    for (int i = 0; i < m; ++i) {
      float* row = c + static_cast<int64_t>(i) * ldc;
      for (int j = 0; j < n; ++j) row[j] = beta == 0.0f ? 0.0f : beta * row[j];
    }
    return;
  }
  thread_local std::vector<float> apack(static_cast<size_t>(kMC) * kKC);
  thread_local std::vector<float> bpack(static_cast<size_t>(kKC) * (kNC + kNR));
  alignas(32) float edge[kMR * kNR];

  for (int jc = 0; jc < n; jc += kNC) {
    const int nc = std::min(kNC, n - jc);
    for (int pc = 0; pc < k; pc += kKC) {
      const int kc = std::min(kKC, k - pc);
      pack_b(trans_b, b, ldb, pc, kc, jc, nc, bpack.data());
      const float beta_eff = pc == 0 ? beta : 1.0f;
      for (int ic = 0; ic < m; ic += kMC) {
        const int mc = std::min(kMC, m - ic);
        pack_a(trans_a, a, lda, ic, mc, pc, kc, apack.data());
        for (int jr = 0; jr < nc; jr += kNR) {
          const int ncols = std::min(kNR, nc - jr);
          const float* bp = bpack.data() + static_cast<int64_t>(jr) * kc;
          for (int ir = 0; ir < mc; ir += kMR) {
            const int nrows = std::min(kMR, mc - ir);
            const float* ap = apack.data() + static_cast<int64_t>(ir) * kc;
            float* ctile = c + static_cast<int64_t>(ic + ir) * ldc + jc + jr;
            if (nrows == kMR && ncols == kNR) {
              micro_kernel(kc, ap, bp, ctile, ldc, alpha, beta_eff);
            } else {
              micro_kernel(kc, ap, bp, edge, kNR, alpha, 0.0f);
              for (int r = 0; r < nrows; ++r) {
                float* crow = ctile + static_cast<int64_t>(r) * ldc;
                const float* erow = edge + r * kNR;
                if (beta_eff == 0.0f) {
                  for (int q = 0; q < ncols; ++q) crow[q] = erow[q];
                } else {
                  for (int q = 0; q < ncols; ++q) crow[q] = erow[q] + beta_eff * crow[q];
                }
              }
            }
          }
        }
      }
    }
  }
}

void axpy(int64_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void adam_step(int64_t n, float* w, const float* g, float* m, float* v, const AdamCoeffs& c) {
  // Same operation order as the scalar reference and no fused multiply-add,
  // so both paths produce identical bits.
  const __m256 b1 = _mm256_set1_ps(c.beta1), b2 = _mm256_set1_ps(c.beta2);
  const __m256 ob1 = _mm256_set1_ps(1.0f - c.beta1), ob2 = _mm256_set1_ps(1.0f - c.beta2);
  const __m256 inv = _mm256_set1_ps(c.inv_sqrt_bc2), eps = _mm256_set1_ps(c.eps), lr = _mm256_set1_ps(c.lr);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 gi = _mm256_loadu_ps(g + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)), _mm256_mul_ps(ob1, gi));
    const __m256 vi =
        _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)), _mm256_mul_ps(ob2, _mm256_mul_ps(gi, gi)));
    const __m256 denom = _mm256_add_ps(_mm256_mul_ps(_mm256_sqrt_ps(vi), inv), eps);
    const __m256 wi = _mm256_sub_ps(_mm256_loadu_ps(w + i), _mm256_mul_ps(lr, _mm256_div_ps(mi, denom)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    _mm256_storeu_ps(w + i, wi);
  }
  if (i < n) ref::adam_step(n - i, w + i, g + i, m + i, v + i, c);
}

// Cephes-style expf: range reduction by ln2 then a degree-5 polynomial.
inline __m256 exp256(__m256 x) {
  x = _mm256_min_ps(x, _mm256_set1_ps(88.3762626647949f));
  x = _mm256_max_ps(x, _mm256_set1_ps(-88.3762626647949f));
  __m256 fx = _mm256_fmadd_ps(x, _mm256_set1_ps(1.44269504088896341f), _mm256_set1_ps(0.5f));
  fx = _mm256_floor_ps(fx);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(0.693359375f), x);
  x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(-2.12194440e-4f), x);
  __m256 y = _mm256_set1_ps(1.9875691500e-4f);
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
  y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
  const __m256 x2 = _mm256_mul_ps(x, x);
  y = _mm256_fmadd_ps(y, x2, _mm256_add_ps(x, _mm256_set1_ps(1.0f)));
  __m256i e = _mm256_cvttps_epi32(fx);
  e = _mm256_slli_epi32(_mm256_add_epi32(e, _mm256_set1_epi32(0x7f)), 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(e));
}

// erf(|u|) via Abramowitz-Stegun 7.1.26 (abs error < 1.5e-7); returns the
// signed value and hands back exp(-u^2) for the GELU derivative.
inline __m256 erf256(__m256 u, __m256* gauss) {
  const __m256 sign_mask = _mm256_set1_ps(-0.0f);
  const __m256 sign = _mm256_and_ps(u, sign_mask);
  const __m256 au = _mm256_andnot_ps(sign_mask, u);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 t = _mm256_div_ps(one, _mm256_fmadd_ps(_mm256_set1_ps(0.3275911f), au, one));
  __m256 poly = _mm256_set1_ps(1.061405429f);
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(-1.453152027f));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(1.421413741f));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(-0.284496736f));
  poly = _mm256_fmadd_ps(poly, t, _mm256_set1_ps(0.254829592f));
  poly = _mm256_mul_ps(poly, t);
  *gauss = exp256(_mm256_sub_ps(_mm256_setzero_ps(), _mm256_mul_ps(au, au)));
  const __m256 r = _mm256_fnmadd_ps(poly, *gauss, one);
  return _mm256_or_ps(r, sign);
}

void gelu_forward(int64_t n, const float* x, float* y) {
  const __m256 inv_sqrt2 = _mm256_set1_ps(0.70710678118654752f);
  const __m256 half = _mm256_set1_ps(0.5f), one = _mm256_set1_ps(1.0f);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xi = _mm256_loadu_ps(x + i);
    __m256 gauss;
    const __m256 e = erf256(_mm256_mul_ps(xi, inv_sqrt2), &gauss);
    _mm256_storeu_ps(y + i, _mm256_mul_ps(_mm256_mul_ps(half, xi), _mm256_add_ps(one, e)));
  }
  if (i < n) ref::gelu_forward(n - i, x + i, y + i);
}

void gelu_backward(int64_t n, const float* x, const float* dy, float* dx) {
  const __m256 inv_sqrt2 = _mm256_set1_ps(0.70710678118654752f);
  const __m256 inv_sqrt2pi = _mm256_set1_ps(0.39894228040143268f);
  const __m256 half = _mm256_set1_ps(0.5f), one = _mm256_set1_ps(1.0f);
  int64_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 xi = _mm256_loadu_ps(x + i);
    __m256 gauss;
    const __m256 e = erf256(_mm256_mul_ps(xi, inv_sqrt2), &gauss);
    const __m256 cdf = _mm256_mul_ps(half, _mm256_add_ps(one, e));
    const __m256 pdf = _mm256_mul_ps(inv_sqrt2pi, gauss);
    const __m256 d = _mm256_fmadd_ps(xi, pdf, cdf);
    _mm256_storeu_ps(dx + i, _mm256_mul_ps(_mm256_loadu_ps(dy + i), d));
  }
  if (i < n) ref::gelu_backward(n - i, x + i, dy + i, dx + i);
}

void filter_rows(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst) {
  const int out_cols = cols - ntaps + 1;
  for (int r = 0; r < rows; ++r) {
    const float* s = src + static_cast<int64_t>(r) * cols;
    float* d = dst + static_cast<int64_t>(r) * out_cols;
    int c = 0;
    for (; c + 8 <= out_cols; c += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (int t = 0; t < ntaps; ++t) acc = _mm256_fmadd_ps(_mm256_set1_ps(taps[t]), _mm256_loadu_ps(s + c + t), acc);
      _mm256_storeu_ps(d + c, acc);
    }
    for (; c < out_cols; ++c) {
      float acc = 0.0f;
      for (int t = 0; t < ntaps; ++t) acc += taps[t] * s[c + t];
      d[c] = acc;
    }
  }
}

void filter_cols(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst) {
  const int out_rows = rows - ntaps + 1;
  for (int r = 0; r < out_rows; ++r) {
    float* d = dst + static_cast<int64_t>(r) * cols;
    int c = 0;
    for (; c + 8 <= cols; c += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (int t = 0; t < ntaps; ++t) {
        acc = _mm256_fmadd_ps(_mm256_set1_ps(taps[t]), _mm256_loadu_ps(src + static_cast<int64_t>(r + t) * cols + c),
                              acc);
      }
      _mm256_storeu_ps(d + c, acc);
    }
    for (; c < cols; ++c) {
      float acc = 0.0f;
      for (int t = 0; t < ntaps; ++t) acc += taps[t] * src[static_cast<int64_t>(r + t) * cols + c];
      d[c] = acc;
    }
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Isa::kAvx2, sgemm, axpy, adam_step, gelu_forward, gelu_backward, filter_rows, filter_cols};
  return t;
}

}  // namespace enerv::kernels::avx2
