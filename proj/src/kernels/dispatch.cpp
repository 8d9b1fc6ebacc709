// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "enerv/kernels.hpp"

namespace enerv::kernels {

#if defined(ENERV_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

namespace {

KernelTable make_scalar() {
  KernelTable t{};
  t.isa = Isa::kScalar;
  t.sgemm = ref::gemm<float>;
  t.axpy = ref::axpy<float>;
  t.adam_step = ref::adam_step;
  t.gelu_forward = ref::gelu_forward<float>;
  t.gelu_backward = ref::gelu_backward<float>;
  t.filter_rows = ref::filter_rows<float>;
  t.filter_cols = ref::filter_cols<float>;
  return t;
}

const KernelTable* initial_table() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("ENERV_DEVICE"); env != nullptr && *env != '\0' &&
                                                       std::string_view(env) != "auto") {
    const Isa wanted = parse_isa(env);
    if (host_supports(wanted)) isa = wanted;
  }
  return isa == Isa::kAvx2 ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  throw std::invalid_argument("unknown kernel ISA '" + std::string(name) + "' (expected scalar|avx2)");
}

const KernelTable& scalar_table() {
  static const KernelTable t = make_scalar();
  return t;
}

const KernelTable* avx2_table() {
#if defined(ENERV_HAVE_AVX2)
  if (host_supports(Isa::kAvx2)) return &avx2::table();
#endif
  return nullptr;
}

bool host_supports(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if defined(ENERV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa detected_isa() { return host_supports(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_isa(Isa isa) {
  if (!host_supports(isa)) {
    throw std::runtime_error("kernel ISA '" + std::string(isa_name(isa)) + "' is not supported on this host");
  }
  current().store(isa == Isa::kAvx2 ? avx2_table() : &scalar_table(), std::memory_order_release);
}

template <>
void gemm<float>(bool ta, bool tb, int m, int n, int k, float alpha, const float* a, int lda, const float* b, int ldb,
                 float beta, float* c, int ldc) {
  active().sgemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}
template <>
void gemm<double>(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, int lda, const double* b,
                  int ldb, double beta, double* c, int ldc) {
  ref::gemm<double>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

template <>
void axpy<float>(int64_t n, float alpha, const float* x, float* y) {
  active().axpy(n, alpha, x, y);
}
template <>
void axpy<double>(int64_t n, double alpha, const double* x, double* y) {
  ref::axpy<double>(n, alpha, x, y);
}

template <>
void gelu_forward<float>(int64_t n, const float* x, float* y) {
  active().gelu_forward(n, x, y);
}
template <>
void gelu_forward<double>(int64_t n, const double* x, double* y) {
  ref::gelu_forward<double>(n, x, y);
}

template <>
void gelu_backward<float>(int64_t n, const float* x, const float* dy, float* dx) {
  active().gelu_backward(n, x, dy, dx);
}
template <>
void gelu_backward<double>(int64_t n, const double* x, const double* dy, double* dx) {
  ref::gelu_backward<double>(n, x, dy, dx);
}

template <>
void filter_rows<float>(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst) {
  active().filter_rows(rows, cols, src, taps, ntaps, dst);
}
template <>
void filter_rows<double>(int rows, int cols, const double* src, const double* taps, int ntaps, double* dst) {
  ref::filter_rows<double>(rows, cols, src, taps, ntaps, dst);
}

template <>
void filter_cols<float>(int rows, int cols, const float* src, const float* taps, int ntaps, float* dst) {
  active().filter_cols(rows, cols, src, taps, ntaps, dst);
}
template <>
void filter_cols<double>(int rows, int cols, const double* src, const double* taps, int ntaps, double* dst) {
  ref::filter_cols<double>(rows, cols, src, taps, ntaps, dst);
}

}  // namespace enerv::kernels
