#pragma once

#include <cstddef>

// Dense numeric kernels. Each has an OpenMP-parallel entry point and a serial
// reference implementation kept for the tests and the benchmark. Parallel
// variants assign whole output elements to a single thread with a fixed
// per-element accumulation order, so they match the serial versions bit for
// bit at any thread count.
namespace gdplan::nn::kernels {

// C[n,m] = op(A) * op(B) with op controlled by the trans flags. Row-major.
// A is [n,k] (or [k,n] when trans_a), B is [k,m] (or [m,k] when trans_b).
void matmul(const double* a, const double* b, double* c, int n, int k, int m,
            bool trans_a = false, bool trans_b = false);
void matmul_serial(const double* a, const double* b, double* c, int n, int k, int m,
                   bool trans_a = false, bool trans_b = false);

// Row-wise softmax of x[rows, cols].
void softmax_rows(const double* x, double* y, int rows, int cols);
void softmax_rows_serial(const double* x, double* y, int rows, int cols);

// Row-wise normalization (no affine). Also emits per-row mean and reciprocal
// stddev for the backward pass. Variance is the population variance.
void layer_norm_rows(const double* x, double* y, double* mean, double* rstd,
                     int rows, int cols, double eps);
void layer_norm_rows_serial(const double* x, double* y, double* mean, double* rstd,
                            int rows, int cols, double eps);

// Sum with fixed-block combination: partial sums over 4096-element blocks are
// added in block order, so the result does not depend on the thread count.
double reduce_sum(const double* x, std::size_t n);
double reduce_sum_serial(const double* x, std::size_t n);

}  // namespace gdplan::nn::kernels
