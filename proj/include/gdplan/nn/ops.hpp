#pragma once

#include <vector>

#include "gdplan/nn/tensor.hpp"

// Differentiable ops over Tensor. Every op computes eagerly and, when an
// input is attached to a tape, records a backward closure. Ops never mutate
// their inputs. Broadcasting is not supported beyond the explicit row/column
// helpers; reshape explicitly instead.
namespace gdplan::nn {

// Elementwise, same shape
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor divide(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, double c);
Tensor add_scalar(const Tensor& x, double c);
Tensor relu(const Tensor& x);
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor exp_op(const Tensor& x);
Tensor log_op(const Tensor& x);
Tensor abs_op(const Tensor& x);
Tensor tanh_op(const Tensor& x);
Tensor square(const Tensor& x);
// Wraps each element into (-pi, pi]; derivative 1 away from the seam.
Tensor wrap_angle_op(const Tensor& x);
// x * s with s a scalar tensor (the adaptive gate path).
Tensor scale_by(const Tensor& x, const Tensor& s);

// 2-D linear algebra
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);

// Structure
Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& parts, int axis);      // 2-D
Tensor slice(const Tensor& x, int axis, int start, int len);    // 1-D or 2-D
Tensor gather_rows(const Tensor& table, const std::vector<int>& ids);

// Reductions
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);
Tensor sum_axis(const Tensor& x, int axis);    // 2-D -> 1-D
Tensor mean_axis(const Tensor& x, int axis);   // 2-D -> 1-D

// Row/column helpers for 2-D x
Tensor add_rowvec(const Tensor& x, const Tensor& v);  // v: [cols], added to each row
Tensor mul_rows(const Tensor& x, const Tensor& s);    // s: [rows], scales row i by s[i]

Tensor softmax(const Tensor& x, int axis = -1);  // 1-D, or 2-D along axis
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

// Value-only helpers (no gradient)
double tensor_max_abs(const Tensor& x);
bool all_finite(const Tensor& x);

}  // namespace gdplan::nn
