#include "gdplan/nn/layers.hpp"

#include <cmath>

namespace gdplan::nn {

void watch_all(Tape& tape, const ParamRefs& params) {
  for (const ParamRef& p : params) tape.watch(*p.tensor);
}

void zero_grads(const ParamRefs& params) {
  for (const ParamRef& p : params) p.tensor->zero_grad();
}

Linear::Linear(int in, int out, CounterRng& rng) {
  const double bound = std::sqrt(6.0 / (in + out));
  std::vector<double> wv(static_cast<std::size_t>(in) * out);
  for (auto& v : wv) v = rng.uniform(-bound, bound);
  w = Tensor({in, out}, std::move(wv));
  b = Tensor::zeros({out});
}

Tensor Linear::forward(const Tensor& x) const { return add_rowvec(matmul(x, w), b); }

void Linear::collect(const std::string& prefix, ParamRefs& out) {
  out.push_back({prefix + ".w", &w});
  out.push_back({prefix + ".b", &b});
}

LayerNormP::LayerNormP(int dim) {
  gamma = Tensor::full({dim}, 1.0);
  beta = Tensor::zeros({dim});
}

Tensor LayerNormP::forward(const Tensor& x) const { return layer_norm(x, gamma, beta); }

void LayerNormP::collect(const std::string& prefix, ParamRefs& out) {
  out.push_back({prefix + ".gamma", &gamma});
  out.push_back({prefix + ".beta", &beta});
}

Mlp::Mlp(int in, int hidden, int out, CounterRng& rng, Act act_)
    : fc1(in, hidden, rng), fc2(hidden, out, rng), act(act_) {}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = fc1.forward(x);
  h = act == Act::relu ? relu(h) : gelu(h);
  return fc2.forward(h);
}

void Mlp::collect(const std::string& prefix, ParamRefs& out) {
  fc1.collect(prefix + ".fc1", out);
  fc2.collect(prefix + ".fc2", out);
}

MultiHeadAttention::MultiHeadAttention(int dim_, int kv_dim, int heads_, CounterRng& rng)
    : heads(heads_), dim(dim_) {
  if (dim % heads != 0)
    throw ShapeError("attention width " + std::to_string(dim) + " not divisible by " +
                     std::to_string(heads) + " heads");
  wq = Linear(dim, dim, rng);
  wk = Linear(kv_dim, dim, rng);
  wv = Linear(kv_dim, dim, rng);
  wo = Linear(dim, dim, rng);
}

Tensor MultiHeadAttention::forward(const Tensor& q, const Tensor& k, const Tensor& v,
                                   const Tensor* mask) const {
  if (k.dim(0) != v.dim(0))
    throw ShapeError("attention keys " + shape_str(k.shape()) + " vs values " +
                     shape_str(v.shape()));
  const Tensor qp = wq.forward(q);
  const Tensor kp = wk.forward(k);
  const Tensor vp = wv.forward(v);
  const int dh = dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<Tensor> head_outs;
  head_outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Tensor qh = slice(qp, 1, h * dh, dh);
    Tensor kh = slice(kp, 1, h * dh, dh);
    Tensor vh = slice(vp, 1, h * dh, dh);
    Tensor scores = scale(matmul(qh, transpose(kh)), inv_sqrt);
    if (mask != nullptr) scores = add(scores, *mask);
    Tensor attn = softmax(scores, 1);
    head_outs.push_back(matmul(attn, vh));
  }
  return wo.forward(concat(head_outs, 1));
}

void MultiHeadAttention::collect(const std::string& prefix, ParamRefs& out) {
  wq.collect(prefix + ".wq", out);
  wk.collect(prefix + ".wk", out);
  wv.collect(prefix + ".wv", out);
  wo.collect(prefix + ".wo", out);
}

TransformerBlock::TransformerBlock(int dim, int hidden, int heads, CounterRng& rng)
    : ln1(dim), ln2(dim), attn(dim, dim, heads, rng), mlp(dim, hidden, dim, rng, Act::gelu) {}

Tensor TransformerBlock::forward(const Tensor& x, const Tensor* mask) const {
  Tensor n1 = ln1.forward(x);
  Tensor x1 = add(x, attn.forward(n1, n1, n1, mask));
  return add(x1, mlp.forward(ln2.forward(x1)));
}

void TransformerBlock::collect(const std::string& prefix, ParamRefs& out) {
  ln1.collect(prefix + ".ln1", out);
  ln2.collect(prefix + ".ln2", out);
  attn.collect(prefix + ".attn", out);
  mlp.collect(prefix + ".mlp", out);
}

Tensor causal_mask(int len) {
  Tensor m({len, len});
  double* mv = m.data();
  for (int i = 0; i < len; ++i)
    for (int j = 0; j < len; ++j)
      mv[static_cast<std::size_t>(i) * len + j] = j <= i ? 0.0 : -1e30;
  return m;
}

Tensor key_mask(int query_rows, const std::vector<uint8_t>& keep) {
  const int cols = static_cast<int>(keep.size());
  Tensor m({query_rows, cols});
  double* mv = m.data();
  for (int i = 0; i < query_rows; ++i)
    for (int j = 0; j < cols; ++j)
      mv[static_cast<std::size_t>(i) * cols + j] = keep[static_cast<std::size_t>(j)] ? 0.0 : -1e30;
  return m;
}

}  // namespace gdplan::nn
