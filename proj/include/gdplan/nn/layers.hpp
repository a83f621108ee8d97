#pragma once

#include <string>
#include <vector>

#include "gdplan/nn/ops.hpp"
#include "gdplan/nn/rng.hpp"
#include "gdplan/nn/tensor.hpp"

namespace gdplan::nn {

struct ParamRef {
  std::string name;
  Tensor* tensor;
};
using ParamRefs = std::vector<ParamRef>;

// Watches every parameter on the tape (call before building the graph).
void watch_all(Tape& tape, const ParamRefs& params);
void zero_grads(const ParamRefs& params);

enum class Act { relu, gelu };

class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, CounterRng& rng);
  Tensor forward(const Tensor& x) const;  // [n,in] -> [n,out]
  void collect(const std::string& prefix, ParamRefs& out);

  Tensor w;  // [in, out]
  Tensor b;  // [out]
};

class LayerNormP {
 public:
  LayerNormP() = default;
  explicit LayerNormP(int dim);
  Tensor forward(const Tensor& x) const;
  void collect(const std::string& prefix, ParamRefs& out);

  Tensor gamma, beta;
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(int in, int hidden, int out, CounterRng& rng, Act act = Act::gelu);
  Tensor forward(const Tensor& x) const;
  void collect(const std::string& prefix, ParamRefs& out);

  Linear fc1, fc2;
  Act act = Act::gelu;
};

// Standard scaled dot-product attention with separate key/value input width,
// per-head slicing, and an optional additive mask (use 0 / -1e30 entries).
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int dim, int kv_dim, int heads, CounterRng& rng);
  Tensor forward(const Tensor& q, const Tensor& k, const Tensor& v,
                 const Tensor* mask = nullptr) const;
  void collect(const std::string& prefix, ParamRefs& out);

  int heads = 1;
  int dim = 0;
  Linear wq, wk, wv, wo;
};

// Pre-norm transformer block: x + attn(ln1(x)), then x + mlp(ln2(x)).
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(int dim, int hidden, int heads, CounterRng& rng);
  Tensor forward(const Tensor& x, const Tensor* mask = nullptr) const;
  void collect(const std::string& prefix, ParamRefs& out);

  LayerNormP ln1, ln2;
  MultiHeadAttention attn;
  Mlp mlp;
};

// Additive causal mask: 0 where j <= i, -1e30 otherwise.
Tensor causal_mask(int len);
// Additive key mask from keep flags: columns with keep[j]==0 get -1e30.
Tensor key_mask(int query_rows, const std::vector<uint8_t>& keep);

}  // namespace gdplan::nn
