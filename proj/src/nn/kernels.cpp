#include "gdplan/nn/kernels.hpp"

#include <cmath>
#include <vector>

namespace gdplan::nn::kernels {

namespace {

inline void matmul_row(const double* a, const double* b, double* c_row, int i, int n,
                       int k, int m, bool trans_a, bool trans_b) {
  for (int j = 0; j < m; ++j) c_row[j] = 0.0;
  for (int kk = 0; kk < k; ++kk) {
    const double av = trans_a ? a[static_cast<std::size_t>(kk) * n + i]
                              : a[static_cast<std::size_t>(i) * k + kk];
    if (av == 0.0) continue;
    if (trans_b) {
      for (int j = 0; j < m; ++j) c_row[j] += av * b[static_cast<std::size_t>(j) * k + kk];
    } else {
      const double* b_row = b + static_cast<std::size_t>(kk) * m;
      for (int j = 0; j < m; ++j) c_row[j] += av * b_row[j];
    }
  }
}

inline void softmax_row(const double* x, double* y, int cols) {
  double mx = x[0];
  for (int j = 1; j < cols; ++j) mx = x[j] > mx ? x[j] : mx;
  double sum = 0.0;
  for (int j = 0; j < cols; ++j) {
    y[j] = std::exp(x[j] - mx);
    sum += y[j];
  }
  const double inv = 1.0 / sum;
  for (int j = 0; j < cols; ++j) y[j] *= inv;
}

inline void layer_norm_row(const double* x, double* y, double* mean, double* rstd,
                           int cols, double eps) {
  double mu = 0.0;
  for (int j = 0; j < cols; ++j) mu += x[j];
  mu /= cols;
  double var = 0.0;
  for (int j = 0; j < cols; ++j) {
    const double d = x[j] - mu;
    var += d * d;
  }
  var /= cols;
  const double rs = 1.0 / std::sqrt(var + eps);
  for (int j = 0; j < cols; ++j) y[j] = (x[j] - mu) * rs;
  *mean = mu;
  *rstd = rs;
}

constexpr std::size_t kSumBlock = 4096;

}  // namespace

void matmul_serial(const double* a, const double* b, double* c, int n, int k, int m,
                   bool trans_a, bool trans_b) {
  for (int i = 0; i < n; ++i)
    matmul_row(a, b, c + static_cast<std::size_t>(i) * m, i, n, k, m, trans_a, trans_b);
}

void matmul(const double* a, const double* b, double* c, int n, int k, int m,
            bool trans_a, bool trans_b) {
  const long long work = static_cast<long long>(n) * k * m;
#pragma omp parallel for schedule(static) if (n > 1 && work > 32768)
  for (int i = 0; i < n; ++i)
    matmul_row(a, b, c + static_cast<std::size_t>(i) * m, i, n, k, m, trans_a, trans_b);
}

void softmax_rows_serial(const double* x, double* y, int rows, int cols) {
  for (int i = 0; i < rows; ++i)
    softmax_row(x + static_cast<std::size_t>(i) * cols, y + static_cast<std::size_t>(i) * cols, cols);
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
#pragma omp parallel for schedule(static) if (rows > 4 && rows * cols > 4096)
  for (int i = 0; i < rows; ++i)
    softmax_row(x + static_cast<std::size_t>(i) * cols, y + static_cast<std::size_t>(i) * cols, cols);
}

void layer_norm_rows_serial(const double* x, double* y, double* mean, double* rstd,
                            int rows, int cols, double eps) {
  for (int i = 0; i < rows; ++i)
    layer_norm_row(x + static_cast<std::size_t>(i) * cols, y + static_cast<std::size_t>(i) * cols,
                   mean + i, rstd + i, cols, eps);
}

void layer_norm_rows(const double* x, double* y, double* mean, double* rstd,
                     int rows, int cols, double eps) {
#pragma omp parallel for schedule(static) if (rows > 4 && rows * cols > 4096)
  for (int i = 0; i < rows; ++i)
    layer_norm_row(x + static_cast<std::size_t>(i) * cols, y + static_cast<std::size_t>(i) * cols,
                   mean + i, rstd + i, cols, eps);
}

double reduce_sum_serial(const double* x, std::size_t n) {
  const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kSumBlock;
    const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += x[i];
    total += part;
  }
  return total;
}

double reduce_sum(const double* x, std::size_t n) {
  const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
  if (blocks < 2) return reduce_sum_serial(x, n);
  std::vector<double> parts(blocks, 0.0);
  const long long nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t hi = lo + kSumBlock < n ? lo + kSumBlock : n;
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += x[i];
    parts[static_cast<std::size_t>(b)] = part;
  }
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace gdplan::nn::kernels
