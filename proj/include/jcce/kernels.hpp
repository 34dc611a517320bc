#pragma once

#include <cstddef>

namespace jcce::kernels {

// Dense matrix kernels over raw row-major buffers. Each kernel has an
// OpenMP-parallel entry point (the default) and a serial reference twin used
// by the tests and the benchmark. Parallelization is over output rows only
// and every output element accumulates in fixed k-order, so parallel results
// are bit-identical to serial regardless of thread count.

// c[m x n] = a[m x k] * b[k x n]
void mm_nn(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n);
void mm_nn_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n);

// c[m x n] = a[m x k] * b[n x k]^T
void mm_nt(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n);
void mm_nt_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n);

// c[m x n] = a[k x m]^T * b[k x n]
void mm_tn(const double* a, const double* b, double* c, size_t m, size_t k,
           size_t n);
void mm_tn_serial(const double* a, const double* b, double* c, size_t m,
                  size_t k, size_t n);

// out[r] = max(0, in[r]) elementwise over len entries.
void relu(const double* in, double* out, size_t len);

// out[i,:] = in[i,:] + bias for each of m rows of width n.
void add_bias_rows(const double* in, const double* bias, double* out, size_t m,
                   size_t n);

// bias_grad[j] = sum_i grad[i,j]
void col_sums(const double* grad, double* out, size_t m, size_t n);

}  // namespace jcce::kernels
