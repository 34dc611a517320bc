#include "jcce/kernels.hpp"

#include <cstdint>

namespace jcce::kernels {

namespace {

inline void mm_nn_row(const double* __restrict ai, const double* __restrict b,
                      double* __restrict ci, size_t k, size_t n) {
  for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
  for (size_t p = 0; p < k; ++p) {
    const double av = ai[p];
    const double* __restrict bp = b + p * n;
    for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void mm_nt_row(const double* __restrict ai, const double* __restrict b,
                      double* __restrict ci, size_t k, size_t n) {
  for (size_t j = 0; j < n; ++j) {
    const double* __restrict bj = b + j * k;
    double acc = 0.0;
    for (size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
    ci[j] = acc;
  }
}

}  // namespace

void mm_nn(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(m); ++i)
    mm_nn_row(a + i * k, b, c + i * n, k, n);
}

void mm_nn_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) mm_nn_row(a + i * k, b, c + i * n, k, n);
}

void mm_nt(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(m); ++i)
    mm_nt_row(a + i * k, b, c + i * n, k, n);
}

void mm_nt_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) mm_nt_row(a + i * k, b, c + i * n, k, n);
}

void mm_tn(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n) {
  // a is k x m, walked column-wise; accumulate row blocks of c in k-order.
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(m); ++i) {
    double* __restrict ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (size_t p = 0; p < k; ++p) {
      const double av = a[p * m + i];
      const double* __restrict bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void mm_tn_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) {
    double* __restrict ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (size_t p = 0; p < k; ++p) {
      const double av = a[p * m + i];
      const double* __restrict bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void relu(const double* in, double* out, size_t len) {
  for (size_t i = 0; i < len; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void add_bias_rows(const double* in, const double* bias, double* out, size_t m,
                   size_t n) {
  for (size_t i = 0; i < m; ++i) {
    const double* ini = in + i * n;
    double* outi = out + i * n;
    for (size_t j = 0; j < n; ++j) outi[j] = ini[j] + bias[j];
  }
}

void col_sums(const double* grad, double* out, size_t m, size_t n) {
  for (size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double* gi = grad + i * n;
    for (size_t j = 0; j < n; ++j) out[j] += gi[j];
  }
}

}  // namespace jcce::kernels
