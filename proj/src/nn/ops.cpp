#include "gdplan/nn/ops.hpp"

#include <cmath>
#include <utility>

#include "gdplan/nn/kernels.hpp"

namespace gdplan::nn {

namespace {

using GraphPtr = std::shared_ptr<detail::TapeImpl>;

GraphPtr common_tape(std::initializer_list<const Tensor*> ts) {
  GraphPtr graph;
  for (const Tensor* t : ts) {
    GraphPtr g = t->graph();
    if (!g) continue;
    if (!graph) graph = std::move(g);
    else if (graph != g)
      throw InvariantError("op mixes tensors from two different tapes");
  }
  return graph;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
}

// Builds the result tensor, recording fn when any input is attached.
Tensor make_result(Shape shape, std::vector<double> vals, const GraphPtr& tape,
                   std::vector<int> parents, detail::BackwardFn fn) {
  Tensor out(std::move(shape), std::move(vals));
  if (tape) {
    const int id = tape->record(static_cast<int>(out.size()), std::move(parents), std::move(fn));
    out.attach(tape, id);
  }
  return out;
}

int parent_of(const Tensor& t, const GraphPtr& tape) {
  return tape ? t.node_in(tape.get()) : -1;
}

// Elementwise unary with value and local-derivative lambdas.
template <typename FwdFn, typename DerivFn>
Tensor unary_op(const Tensor& x, FwdFn f, DerivFn dfdx) {
  GraphPtr tape = common_tape({&x});
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  auto xs = x.storage();
  return make_result(x.shape(), std::move(out), tape, {parent_of(x, tape)},
                     [xs, dfdx](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& gx = *slots[0];
                       const auto& xv = *xs;
                       for (std::size_t i = 0; i < dy.size(); ++i) gx[i] += dy[i] * dfdx(xv[i]);
                     });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  GraphPtr tape = common_tape({&a, &b});
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  return make_result(a.shape(), std::move(out), tape, {parent_of(a, tape), parent_of(b, tape)},
                     [](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       for (int s = 0; s < 2; ++s) {
                         if (!slots[static_cast<std::size_t>(s)]) continue;
                         auto& g = *slots[static_cast<std::size_t>(s)];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
                       }
                     });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  GraphPtr tape = common_tape({&a, &b});
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i];
  return make_result(a.shape(), std::move(out), tape, {parent_of(a, tape), parent_of(b, tape)},
                     [](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
                       }
                       if (slots[1]) {
                         auto& g = *slots[1];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] -= dy[i];
                       }
                     });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  GraphPtr tape = common_tape({&a, &b});
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  auto as = a.storage();
  auto bs = b.storage();
  return make_result(a.shape(), std::move(out), tape, {parent_of(a, tape), parent_of(b, tape)},
                     [as, bs](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {
                         auto& g = *slots[0];
                         const auto& bv = *bs;
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i] * bv[i];
                       }
                       if (slots[1]) {
                         auto& g = *slots[1];
                         const auto& av = *as;
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i] * av[i];
                       }
                     });
}

Tensor divide(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "divide");
  GraphPtr tape = common_tape({&a, &b});
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] / bv[i];
  auto as = a.storage();
  auto bs = b.storage();
  return make_result(a.shape(), std::move(out), tape, {parent_of(a, tape), parent_of(b, tape)},
                     [as, bs](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       const auto& av = *as;
                       const auto& bv = *bs;
                       if (slots[0]) {
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i] / bv[i];
                       }
                       if (slots[1]) {
                         auto& g = *slots[1];
                         for (std::size_t i = 0; i < dy.size(); ++i)
                           g[i] -= dy[i] * av[i] / (bv[i] * bv[i]);
                       }
                     });
}

Tensor neg(const Tensor& x) {
  return unary_op(x, [](double v) { return -v; }, [](double) { return -1.0; });
}

Tensor scale(const Tensor& x, double c) {
  return unary_op(x, [c](double v) { return v * c; }, [c](double) { return c; });
}

Tensor add_scalar(const Tensor& x, double c) {
  return unary_op(x, [c](double v) { return v + c; }, [](double) { return 1.0; });
}

Tensor relu(const Tensor& x) {
  return unary_op(x, [](double v) { return v > 0.0 ? v : 0.0; },
                  [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& x) {
  constexpr double kInvSqrt2 = 0.7071067811865476;
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return unary_op(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [](double v) {
        return 0.5 * (1.0 + std::erf(v * kInvSqrt2)) + v * kInvSqrt2Pi * std::exp(-0.5 * v * v);
      });
}

namespace {
inline double sigmoid_val(double v) {
  if (v >= 0.0) {
    const double e = std::exp(-v);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(v);
  return e / (1.0 + e);
}
}  // namespace

Tensor sigmoid(const Tensor& x) {
  return unary_op(x, [](double v) { return sigmoid_val(v); },
                  [](double v) {
                    const double s = sigmoid_val(v);
                    return s * (1.0 - s);
                  });
}

Tensor softplus(const Tensor& x) {
  return unary_op(x,
                  [](double v) {
                    if (v > 30.0) return v;
                    if (v < -30.0) return std::exp(v);
                    return std::log1p(std::exp(v));
                  },
                  [](double v) { return sigmoid_val(v); });
}

Tensor exp_op(const Tensor& x) {
  return unary_op(x, [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); });
}

Tensor log_op(const Tensor& x) {
  return unary_op(x, [](double v) { return std::log(v); }, [](double v) { return 1.0 / v; });
}

Tensor abs_op(const Tensor& x) {
  return unary_op(x, [](double v) { return std::fabs(v); },
                  [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor tanh_op(const Tensor& x) {
  return unary_op(x, [](double v) { return std::tanh(v); },
                  [](double v) {
                    const double t = std::tanh(v);
                    return 1.0 - t * t;
                  });
}

Tensor square(const Tensor& x) {
  return unary_op(x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Tensor wrap_angle_op(const Tensor& x) {
  constexpr double kPi = 3.141592653589793238462643383279502884;
  return unary_op(x,
                  [](double v) {
                    double w = std::fmod(v + kPi, 2.0 * kPi);
                    if (w < 0.0) w += 2.0 * kPi;
                    return w - kPi;
                  },
                  [](double) { return 1.0; });
}

Tensor scale_by(const Tensor& x, const Tensor& s) {
  if (s.size() != 1) throw ShapeError("scale_by: scale must be scalar, got " + shape_str(s.shape()));
  GraphPtr tape = common_tape({&x, &s});
  const double sv = s.values()[0];
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] * sv;
  auto xs = x.storage();
  return make_result(x.shape(), std::move(out), tape, {parent_of(x, tape), parent_of(s, tape)},
                     [xs, sv](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i] * sv;
                       }
                       if (slots[1]) {
                         const auto& xv = *xs;
                         double acc = 0.0;
                         for (std::size_t i = 0; i < dy.size(); ++i) acc += dy[i] * xv[i];
                         (*slots[1])[0] += acc;
                       }
                     });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  const int n = a.dim(0), k = a.dim(1), m = b.dim(1);
  GraphPtr tape = common_tape({&a, &b});
  std::vector<double> out(static_cast<std::size_t>(n) * m);
  kernels::matmul(a.data(), b.data(), out.data(), n, k, m);
  auto as = a.storage();
  auto bs = b.storage();
  return make_result({n, m}, std::move(out), tape, {parent_of(a, tape), parent_of(b, tape)},
                     [as, bs, n, k, m](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {  // dA = dY * B^T : [n,m] x [m,k]^T
                         std::vector<double> da(static_cast<std::size_t>(n) * k);
                         kernels::matmul(dy.data(), bs->data(), da.data(), n, m, k, false, true);
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += da[i];
                       }
                       if (slots[1]) {  // dB = A^T * dY : [n,k]^T x [n,m]
                         std::vector<double> db(static_cast<std::size_t>(k) * m);
                         kernels::matmul(as->data(), dy.data(), db.data(), k, n, m, true, false);
                         auto& g = *slots[1];
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += db[i];
                       }
                     });
}

Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) throw ShapeError("transpose: expected 2-D, got " + shape_str(x.shape()));
  const int n = x.dim(0), m = x.dim(1);
  GraphPtr tape = common_tape({&x});
  std::vector<double> out(static_cast<std::size_t>(n) * m);
  const double* xv = x.data();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      out[static_cast<std::size_t>(j) * n + i] = xv[static_cast<std::size_t>(i) * m + j];
  return make_result({m, n}, std::move(out), tape, {parent_of(x, tape)},
                     [n, m](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       for (int j = 0; j < m; ++j)
                         for (int i = 0; i < n; ++i)
                           g[static_cast<std::size_t>(i) * m + j] +=
                               dy[static_cast<std::size_t>(j) * n + i];
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.size())
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  GraphPtr tape = common_tape({&x});
  std::vector<double> out = x.values();
  return make_result(std::move(shape), std::move(out), tape, {parent_of(x, tape)},
                     [](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
                     });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: empty part list");
  for (const Tensor& p : parts)
    if (p.rank() != 2) throw ShapeError("concat: expected 2-D parts, got " + shape_str(p.shape()));
  if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");

  GraphPtr tape;
  for (const Tensor& p : parts) {
    GraphPtr g = p.graph();
    if (!g) continue;
    if (!tape) tape = std::move(g);
    else if (tape != g)
      throw InvariantError("op mixes tensors from two different tapes");
  }

  int rows = 0, cols = 0;
  if (axis == 0) {
    cols = parts[0].dim(1);
    for (const Tensor& p : parts) {
      if (p.dim(1) != cols)
        throw ShapeError("concat axis 0: column mismatch " + shape_str(p.shape()));
      rows += p.dim(0);
    }
  } else {
    rows = parts[0].dim(0);
    for (const Tensor& p : parts) {
      if (p.dim(0) != rows) throw ShapeError("concat axis 1: row mismatch " + shape_str(p.shape()));
      cols += p.dim(1);
    }
  }

  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  std::vector<int> parents;
  std::vector<int> sizes0, sizes1;
  if (axis == 0) {
    std::size_t off = 0;
    for (const Tensor& p : parts) {
      const auto& pv = p.values();
      std::copy(pv.begin(), pv.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
      off += pv.size();
      sizes0.push_back(p.dim(0));
      parents.push_back(parent_of(p, tape));
    }
  } else {
    int coff = 0;
    for (const Tensor& p : parts) {
      const int pc = p.dim(1);
      const double* pv = p.data();
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < pc; ++j)
          out[static_cast<std::size_t>(i) * cols + coff + j] =
              pv[static_cast<std::size_t>(i) * pc + j];
      coff += pc;
      sizes1.push_back(pc);
      parents.push_back(parent_of(p, tape));
    }
  }

  return make_result(
      {rows, cols}, std::move(out), tape, std::move(parents),
      [axis, rows, cols, sizes0, sizes1](const std::vector<double>& dy, const detail::GradSlots& slots) {
        if (axis == 0) {
          std::size_t off = 0;
          for (std::size_t s = 0; s < slots.size(); ++s) {
            const std::size_t len = static_cast<std::size_t>(sizes0[s]) * cols;
            if (slots[s]) {
              auto& g = *slots[s];
              for (std::size_t i = 0; i < len; ++i) g[i] += dy[off + i];
            }
            off += len;
          }
        } else {
          int coff = 0;
          for (std::size_t s = 0; s < slots.size(); ++s) {
            const int pc = sizes1[s];
            if (slots[s]) {
              auto& g = *slots[s];
              for (int i = 0; i < rows; ++i)
                for (int j = 0; j < pc; ++j)
                  g[static_cast<std::size_t>(i) * pc + j] +=
                      dy[static_cast<std::size_t>(i) * cols + coff + j];
            }
            coff += pc;
          }
        }
      });
}

Tensor slice(const Tensor& x, int axis, int start, int len) {
  if (x.rank() == 1) {
    if (axis != 0) throw ShapeError("slice: 1-D tensor takes axis 0");
    if (start < 0 || len <= 0 || start + len > x.dim(0))
      throw ShapeError("slice: out of range on " + shape_str(x.shape()));
    GraphPtr tape = common_tape({&x});
    std::vector<double> out(x.values().begin() + start, x.values().begin() + start + len);
    const int total = x.dim(0);
    return make_result({len}, std::move(out), tape, {parent_of(x, tape)},
                       [start, total](const std::vector<double>& dy, const detail::GradSlots& slots) {
                         (void)total;
                         if (!slots[0]) return;
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < dy.size(); ++i)
                           g[static_cast<std::size_t>(start) + i] += dy[i];
                       });
  }
  if (x.rank() != 2) throw ShapeError("slice: expected 1-D or 2-D, got " + shape_str(x.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  if (axis != 0 && axis != 1) throw ShapeError("slice: axis must be 0 or 1");
  const int limit = axis == 0 ? rows : cols;
  if (start < 0 || len <= 0 || start + len > limit)
    throw ShapeError("slice: out of range on " + shape_str(x.shape()));

  GraphPtr tape = common_tape({&x});
  std::vector<double> out;
  Shape shape;
  if (axis == 0) {
    shape = {len, cols};
    out.assign(x.values().begin() + static_cast<std::ptrdiff_t>(start) * cols,
               x.values().begin() + static_cast<std::ptrdiff_t>(start + len) * cols);
  } else {
    shape = {rows, len};
    out.resize(static_cast<std::size_t>(rows) * len);
    const double* xv = x.data();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < len; ++j)
        out[static_cast<std::size_t>(i) * len + j] =
            xv[static_cast<std::size_t>(i) * cols + start + j];
  }
  return make_result(std::move(shape), std::move(out), tape, {parent_of(x, tape)},
                     [axis, rows, cols, start, len](const std::vector<double>& dy,
                                                    const detail::GradSlots& slots) {
                       (void)rows;
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       if (axis == 0) {
                         for (std::size_t i = 0; i < dy.size(); ++i)
                           g[static_cast<std::size_t>(start) * cols + i] += dy[i];
                       } else {
                         const int out_rows = static_cast<int>(dy.size()) / len;
                         for (int i = 0; i < out_rows; ++i)
                           for (int j = 0; j < len; ++j)
                             g[static_cast<std::size_t>(i) * cols + start + j] +=
                                 dy[static_cast<std::size_t>(i) * len + j];
                       }
                     });
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& ids) {
  if (table.rank() != 2) throw ShapeError("gather_rows: table must be 2-D");
  const int rows = table.dim(0), cols = table.dim(1);
  for (int id : ids)
    if (id < 0 || id >= rows)
      throw ShapeError("gather_rows: id " + std::to_string(id) + " out of range [0," +
                       std::to_string(rows) + ")");
  GraphPtr tape = common_tape({&table});
  std::vector<double> out(ids.size() * static_cast<std::size_t>(cols));
  const double* tv = table.data();
  for (std::size_t r = 0; r < ids.size(); ++r)
    for (int j = 0; j < cols; ++j)
      out[r * cols + j] = tv[static_cast<std::size_t>(ids[r]) * cols + j];
  std::vector<int> ids_copy = ids;
  return make_result({static_cast<int>(ids.size()), cols}, std::move(out), tape,
                     {parent_of(table, tape)},
                     [ids_copy, cols](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       for (std::size_t r = 0; r < ids_copy.size(); ++r)
                         for (int j = 0; j < cols; ++j)
                           g[static_cast<std::size_t>(ids_copy[r]) * cols + j] +=
                               dy[r * cols + j];
                     });
}

Tensor sum_all(const Tensor& x) {
  GraphPtr tape = common_tape({&x});
  const double total = kernels::reduce_sum(x.data(), static_cast<std::size_t>(x.size()));
  return make_result({1}, {total}, tape, {parent_of(x, tape)},
                     [](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       for (auto& v : g) v += dy[0];
                     });
}

Tensor mean_all(const Tensor& x) { return scale(sum_all(x), 1.0 / static_cast<double>(x.size())); }

Tensor sum_axis(const Tensor& x, int axis) {
  if (x.rank() != 2) throw ShapeError("sum_axis: expected 2-D, got " + shape_str(x.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  if (axis != 0 && axis != 1) throw ShapeError("sum_axis: axis must be 0 or 1");
  GraphPtr tape = common_tape({&x});
  const double* xv = x.data();
  std::vector<double> out;
  if (axis == 0) {
    out.assign(static_cast<std::size_t>(cols), 0.0);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out[static_cast<std::size_t>(j)] += xv[static_cast<std::size_t>(i) * cols + j];
  } else {
    out.assign(static_cast<std::size_t>(rows), 0.0);
    for (int i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (int j = 0; j < cols; ++j) acc += xv[static_cast<std::size_t>(i) * cols + j];
      out[static_cast<std::size_t>(i)] = acc;
    }
  }
  const int out_len = axis == 0 ? cols : rows;
  return make_result({out_len}, std::move(out), tape, {parent_of(x, tape)},
                     [axis, rows, cols](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       if (axis == 0) {
                         for (int i = 0; i < rows; ++i)
                           for (int j = 0; j < cols; ++j)
                             g[static_cast<std::size_t>(i) * cols + j] += dy[static_cast<std::size_t>(j)];
                       } else {
                         for (int i = 0; i < rows; ++i)
                           for (int j = 0; j < cols; ++j)
                             g[static_cast<std::size_t>(i) * cols + j] += dy[static_cast<std::size_t>(i)];
                       }
                     });
}

Tensor mean_axis(const Tensor& x, int axis) {
  const int denom = axis == 0 ? x.dim(0) : x.dim(1);
  return scale(sum_axis(x, axis), 1.0 / static_cast<double>(denom));
}

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
  if (x.rank() != 2 || v.rank() != 1 || v.dim(0) != x.dim(1))
    throw ShapeError("add_rowvec: " + shape_str(x.shape()) + " + " + shape_str(v.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  GraphPtr tape = common_tape({&x, &v});
  const double* xv = x.data();
  const double* vv = v.data();
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(i) * cols + j] = xv[static_cast<std::size_t>(i) * cols + j] + vv[j];
  return make_result(x.shape(), std::move(out), tape, {parent_of(x, tape), parent_of(v, tape)},
                     [rows, cols](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {
                         auto& g = *slots[0];
                         for (std::size_t i = 0; i < dy.size(); ++i) g[i] += dy[i];
                       }
                       if (slots[1]) {
                         auto& g = *slots[1];
                         for (int i = 0; i < rows; ++i)
                           for (int j = 0; j < cols; ++j)
                             g[static_cast<std::size_t>(j)] += dy[static_cast<std::size_t>(i) * cols + j];
                       }
                     });
}

Tensor mul_rows(const Tensor& x, const Tensor& s) {
  if (x.rank() != 2 || s.rank() != 1 || s.dim(0) != x.dim(0))
    throw ShapeError("mul_rows: " + shape_str(x.shape()) + " * " + shape_str(s.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  GraphPtr tape = common_tape({&x, &s});
  const double* xv = x.data();
  const double* sv = s.data();
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(i) * cols + j] = xv[static_cast<std::size_t>(i) * cols + j] * sv[i];
  auto xs = x.storage();
  auto ss = s.storage();
  return make_result(x.shape(), std::move(out), tape, {parent_of(x, tape), parent_of(s, tape)},
                     [xs, ss, rows, cols](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (slots[0]) {
                         auto& g = *slots[0];
                         const auto& sv = *ss;
                         for (int i = 0; i < rows; ++i)
                           for (int j = 0; j < cols; ++j)
                             g[static_cast<std::size_t>(i) * cols + j] +=
                                 dy[static_cast<std::size_t>(i) * cols + j] * sv[static_cast<std::size_t>(i)];
                       }
                       if (slots[1]) {
                         auto& g = *slots[1];
                         const auto& xv = *xs;
                         for (int i = 0; i < rows; ++i) {
                           double acc = 0.0;
                           for (int j = 0; j < cols; ++j)
                             acc += dy[static_cast<std::size_t>(i) * cols + j] *
                                    xv[static_cast<std::size_t>(i) * cols + j];
                           g[static_cast<std::size_t>(i)] += acc;
                         }
                       }
                     });
}

Tensor softmax(const Tensor& x, int axis) {
  if (x.rank() == 1) {
    Tensor row = reshape(x, {1, x.dim(0)});
    return reshape(softmax(row, 1), {x.dim(0)});
  }
  if (x.rank() != 2) throw ShapeError("softmax: expected 1-D or 2-D, got " + shape_str(x.shape()));
  if (axis == -1) axis = 1;
  if (axis == 0) return transpose(softmax(transpose(x), 1));
  if (axis != 1) throw ShapeError("softmax: axis must be 0 or 1");

  const int rows = x.dim(0), cols = x.dim(1);
  GraphPtr tape = common_tape({&x});
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  kernels::softmax_rows(x.data(), out.data(), rows, cols);
  auto ys = std::make_shared<std::vector<double>>(out);
  return make_result({rows, cols}, std::move(out), tape, {parent_of(x, tape)},
                     [ys, rows, cols](const std::vector<double>& dy, const detail::GradSlots& slots) {
                       if (!slots[0]) return;
                       auto& g = *slots[0];
                       const auto& yv = *ys;
                       for (int i = 0; i < rows; ++i) {
                         const std::size_t off = static_cast<std::size_t>(i) * cols;
                         double dot = 0.0;
                         for (int j = 0; j < cols; ++j) dot += dy[off + j] * yv[off + j];
                         for (int j = 0; j < cols; ++j)
                           g[off + j] += yv[off + j] * (dy[off + j] - dot);
                       }
                     });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() != 2) throw ShapeError("layer_norm: expected 2-D, got " + shape_str(x.shape()));
  const int rows = x.dim(0), cols = x.dim(1);
  if (gamma.rank() != 1 || gamma.dim(0) != cols || beta.rank() != 1 || beta.dim(0) != cols)
    throw ShapeError("layer_norm: affine params " + shape_str(gamma.shape()) + "/" +
                     shape_str(beta.shape()) + " do not match " + shape_str(x.shape()));
  GraphPtr tape = common_tape({&x, &gamma, &beta});

  std::vector<double> xhat(static_cast<std::size_t>(rows) * cols);
  std::vector<double> mean(static_cast<std::size_t>(rows)), rstd(static_cast<std::size_t>(rows));
  kernels::layer_norm_rows(x.data(), xhat.data(), mean.data(), rstd.data(), rows, cols, eps);

  const double* gv = gamma.data();
  const double* bv = beta.data();
  std::vector<double> out(xhat.size());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(i) * cols + j] =
          xhat[static_cast<std::size_t>(i) * cols + j] * gv[j] + bv[j];

  auto xhat_s = std::make_shared<std::vector<double>>(std::move(xhat));
  auto rstd_s = std::make_shared<std::vector<double>>(std::move(rstd));
  auto gamma_s = gamma.storage();
  return make_result(
      {rows, cols}, std::move(out), tape,
      {parent_of(x, tape), parent_of(gamma, tape), parent_of(beta, tape)},
      [xhat_s, rstd_s, gamma_s, rows, cols](const std::vector<double>& dy,
                                            const detail::GradSlots& slots) {
        const auto& xh = *xhat_s;
        const auto& rs = *rstd_s;
        const auto& gv = *gamma_s;
        if (slots[0]) {
          auto& g = *slots[0];
          for (int i = 0; i < rows; ++i) {
            const std::size_t off = static_cast<std::size_t>(i) * cols;
            double sum_dyh = 0.0, sum_dyh_xh = 0.0;
            for (int j = 0; j < cols; ++j) {
              const double dyh = dy[off + j] * gv[static_cast<std::size_t>(j)];
              sum_dyh += dyh;
              sum_dyh_xh += dyh * xh[off + j];
            }
            const double inv_n = 1.0 / cols;
            for (int j = 0; j < cols; ++j) {
              const double dyh = dy[off + j] * gv[static_cast<std::size_t>(j)];
              g[off + j] += rs[static_cast<std::size_t>(i)] *
                            (dyh - inv_n * sum_dyh - xh[off + j] * inv_n * sum_dyh_xh);
            }
          }
        }
        if (slots[1]) {
          auto& g = *slots[1];
          for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
              g[static_cast<std::size_t>(j)] +=
                  dy[static_cast<std::size_t>(i) * cols + j] * xh[static_cast<std::size_t>(i) * cols + j];
        }
        if (slots[2]) {
          auto& g = *slots[2];
          for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
              g[static_cast<std::size_t>(j)] += dy[static_cast<std::size_t>(i) * cols + j];
        }
      });
}

double tensor_max_abs(const Tensor& x) {
  double m = 0.0;
  for (double v : x.values()) m = std::max(m, std::fabs(v));
  return m;
}

bool all_finite(const Tensor& x) {
  for (double v : x.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace gdplan::nn
