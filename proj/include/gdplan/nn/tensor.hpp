#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gdplan/errors.hpp"

namespace gdplan::nn {

using Shape = std::vector<int>;

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

namespace detail {

using GradSlots = std::vector<std::vector<double>*>;
// dy is the gradient of the loss w.r.t. a node's output; slots line up with
// the node's parent list (null for constant parents).
using BackwardFn = std::function<void(const std::vector<double>& dy, const GradSlots& slots)>;

// Shared graph core. Tensors hold weak references, so an attachment to a
// destroyed tape degrades safely into "constant".
struct TapeImpl {
  struct Node {
    int size = 0;
    std::vector<int> parents;
    BackwardFn fn;
  };
  struct Leaf {
    int node = -1;
    std::shared_ptr<std::vector<double>> sink;
  };
  std::vector<Node> nodes;
  std::vector<Leaf> leaves;
  uint64_t epoch = 1;

  int record(int out_size, std::vector<int> parents, BackwardFn fn) {
    nodes.push_back({out_size, std::move(parents), std::move(fn)});
    return static_cast<int>(nodes.size()) - 1;
  }
};

}  // namespace detail

// Dense row-major tensor of doubles. Copies share storage; treat values as
// immutable once a tensor has entered a graph. The optional grad buffer is
// shared across copies and filled by Tape::backward for watched leaves.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);

  bool defined() const { return static_cast<bool>(values_); }
  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  int64_t size() const { return values_ ? static_cast<int64_t>(values_->size()) : 0; }

  double* data() { return values_->data(); }
  const double* data() const { return values_->data(); }
  std::vector<double>& values() { return *values_; }
  const std::vector<double>& values() const { return *values_; }
  double item() const;

  bool has_grad() const { return static_cast<bool>(grad_); }
  std::vector<double>& grad();
  const std::vector<double>& grad() const;
  void ensure_grad();
  void zero_grad();

  std::shared_ptr<std::vector<double>> storage() const { return values_; }
  std::shared_ptr<std::vector<double>> grad_storage() const { return grad_; }

  // Locks the graph this tensor is attached to; null when it acts as a
  // constant (never attached, stale epoch, or tape destroyed).
  std::shared_ptr<detail::TapeImpl> graph() const;
  int node_in(const detail::TapeImpl* g) const;
  void attach(const std::shared_ptr<detail::TapeImpl>& g, int node);
  void detach();

 private:
  Shape shape_;
  std::shared_ptr<std::vector<double>> values_;
  std::shared_ptr<std::vector<double>> grad_;
  std::weak_ptr<detail::TapeImpl> graph_;
  int node_ = -1;
  uint64_t epoch_ = 0;
};

// Reverse-mode tape handle. Nodes are recorded in execution order, so walking
// them backwards is a valid topological order. Single-threaded by design; run
// one tape per worker.
class Tape {
 public:
  Tape() : impl_(std::make_shared<detail::TapeImpl>()) {}

  // Marks a leaf (parameter) so backward accumulates into its grad buffer.
  void watch(Tensor& t);

  // loss must be a scalar recorded on this tape. Accumulates gradients into
  // every watched leaf's grad buffer, then clears the tape for reuse.
  void backward(const Tensor& loss);

  uint64_t epoch() const { return impl_->epoch; }
  int node_count() const { return static_cast<int>(impl_->nodes.size()); }
  const std::shared_ptr<detail::TapeImpl>& impl() const { return impl_; }

 private:
  std::shared_ptr<detail::TapeImpl> impl_;
};

}  // namespace gdplan::nn
