// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Inner-loop kernels. Each entry has a portable scalar reference and, where the
// host supports it, an AVX2+FMA variant. The active table is picked once at
// startup from CPUID and may be overridden with ENERV_DEVICE=scalar|avx2 or
// set_isa(). Double precision always runs the scalar reference; it exists for
// gradient checking.

namespace enerv::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);  // throws std::invalid_argument

struct AdamCoeffs {
  float lr;      // already divided by the first-moment bias correction
  float beta1;
  float beta2;
  float eps;
  float inv_sqrt_bc2;  // 1 / sqrt(1 - beta2^step)
};

struct KernelTable {
  Isa isa;
  // C[MxN] = alpha * op(A) * op(B) + beta * C, row-major. op(A) is MxK.
  // beta == 0 never reads C.
  void (*sgemm)(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
                const float* b, int ldb, float beta, float* c, int ldc);
  void (*axpy)(int64_t n, float alpha, const float* x, float* y);
  void (*adam_step)(int64_t n, float* w, const float* g, float* m, float* v, const AdamCoeffs& c);
  void (*gelu_forward)(int64_t n, const float* x, float* y);
  // dx = dy * gelu'(x)
  void (*gelu_backward)(int64_t n, const float* x, const float* dy, float* dx);
  // Valid 1-d correlation along rows: dst is rows x (cols - taps + 1).
  void (*filter_rows)(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst);
  // Valid 1-d correlation along columns: dst is (rows - taps + 1) x cols.
  void (*filter_cols)(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst);
};

const KernelTable& scalar_table();
/// nullptr when the binary or the host lacks AVX2/FMA.
const KernelTable* avx2_table();

bool host_supports(Isa isa);
Isa detected_isa();

const KernelTable& active();
void set_isa(Isa isa);  // throws if unsupported on this host

// Typed front-ends used by the nn layers. float dispatches through active();
// double runs the scalar reference.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc);
template <typename T>
void axpy(int64_t n, T alpha, const T* x, T* y);
template <typename T>
void gelu_forward(int64_t n, const T* x, T* y);
template <typename T>
void gelu_backward(int64_t n, const T* x, const T* dy, T* dx);
template <typename T>
void filter_rows(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst);
template <typename T>
void filter_cols(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst);

namespace ref {
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda, const T* b, int ldb, T beta,
          T* c, int ldc);
template <typename T>
void axpy(int64_t n, T alpha, const T* x, T* y);
template <typename T>
void gelu_forward(int64_t n, const T* x, T* y);
template <typename T>
void gelu_backward(int64_t n, const T* x, const T* dy, T* dx);
template <typename T>
void filter_rows(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst);
template <typename T>
void filter_cols(int rows, int cols, const T* src, const T* taps, int ntaps, T* dst);
void adam_step(int64_t n, float* w, const float* g, float* m, float* v, const AdamCoeffs& c);
}  // namespace ref

}  // namespace enerv::kernels
