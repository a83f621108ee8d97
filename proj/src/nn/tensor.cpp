#include "gdplan/nn/tensor.hpp"

namespace gdplan::nn {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  out += "]";
  return out;
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)),
      values_(std::make_shared<std::vector<double>>(static_cast<std::size_t>(shape_numel(shape_)), 0.0)) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
  if (static_cast<int64_t>(values.size()) != shape_numel(shape_))
    throw ShapeError("tensor data length " + std::to_string(values.size()) +
                     " does not match shape " + shape_str(shape_));
  values_ = std::make_shared<std::vector<double>>(std::move(values));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(Shape shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(Shape shape, double v) {
  Tensor t(std::move(shape));
  for (auto& x : *t.values_) x = v;
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str(shape_));
  return (*values_)[0];
}

std::vector<double>& Tensor::grad() {
  ensure_grad();
  return *grad_;
}

const std::vector<double>& Tensor::grad() const {
  if (!grad_) throw InvariantError("tensor has no gradient buffer");
  return *grad_;
}

void Tensor::ensure_grad() {
  if (!grad_) grad_ = std::make_shared<std::vector<double>>(values_->size(), 0.0);
}

void Tensor::zero_grad() {
  if (grad_)
    for (auto& g : *grad_) g = 0.0;
}

std::shared_ptr<detail::TapeImpl> Tensor::graph() const {
  auto g = graph_.lock();
  if (!g || epoch_ != g->epoch) return nullptr;
  return g;
}

int Tensor::node_in(const detail::TapeImpl* g) const {
  auto locked = graph_.lock();
  if (locked && locked.get() == g && epoch_ == g->epoch) return node_;
  return -1;
}

void Tensor::attach(const std::shared_ptr<detail::TapeImpl>& g, int node) {
  graph_ = g;
  node_ = node;
  epoch_ = g ? g->epoch : 0;
}

void Tensor::detach() {
  graph_.reset();
  node_ = -1;
  epoch_ = 0;
}

void Tape::watch(Tensor& t) {
  if (!t.defined()) throw InvariantError("cannot watch an undefined tensor");
  if (t.node_in(impl_.get()) >= 0) return;  // already watched this epoch
  t.ensure_grad();
  const int id = impl_->record(static_cast<int>(t.size()), {}, nullptr);
  impl_->leaves.push_back({id, t.grad_storage()});
  t.attach(impl_, id);
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1)
    throw ShapeError("backward requires a scalar loss, got " + shape_str(loss.shape()));
  const int ln = loss.node_in(impl_.get());
  if (ln < 0) throw InvariantError("loss is not recorded on this tape");

  auto& nodes = impl_->nodes;
  std::vector<std::vector<double>> grads(nodes.size());
  grads[static_cast<std::size_t>(ln)] = {1.0};

  auto slot = [&](int p) -> std::vector<double>* {
    if (p < 0) return nullptr;
    auto& g = grads[static_cast<std::size_t>(p)];
    if (g.empty()) g.assign(static_cast<std::size_t>(nodes[static_cast<std::size_t>(p)].size), 0.0);
    return &g;
  };

  for (int i = ln; i >= 0; --i) {
    auto& gi = grads[static_cast<std::size_t>(i)];
    if (gi.empty()) continue;
    const auto& node = nodes[static_cast<std::size_t>(i)];
    if (!node.fn) continue;  // leaf
    detail::GradSlots slots;
    slots.reserve(node.parents.size());
    for (int p : node.parents) slots.push_back(slot(p));
    node.fn(gi, slots);
  }

  for (const auto& leaf : impl_->leaves) {
    const auto& g = grads[static_cast<std::size_t>(leaf.node)];
    if (g.empty()) continue;
    auto& sink = *leaf.sink;
    for (std::size_t i = 0; i < sink.size(); ++i) sink[i] += g[i];
  }

  impl_->nodes.clear();
  impl_->leaves.clear();
  ++impl_->epoch;
}

}  // namespace gdplan::nn
