#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gdplan/nn/checkpoint.hpp"
#include "gdplan/nn/kernels.hpp"
#include "gdplan/nn/layers.hpp"
#include "gdplan/nn/optim.hpp"
#include "gdplan/nn/ops.hpp"
#include "testutil.hpp"

using namespace gdplan;
using namespace gdplan::nn;
using gdplan::testutil::check_gradients;
using gdplan::testutil::random_tensor;

TEST_CASE("matmul identity and shape errors") {
  Tensor eye({3, 3});
  for (int i = 0; i < 3; ++i) eye.data()[i * 3 + i] = 1.0;
  CounterRng rng(7);
  Tensor x = random_tensor({3, 5}, rng);
  Tensor y = matmul(eye, x);
  for (int i = 0; i < 15; ++i) CHECK(y.data()[i] == x.data()[i]);
  CHECK_THROWS_AS(matmul(x, x), ShapeError);
}

TEST_CASE("softmax of equal logits is uniform") {
  for (int k : {1, 3, 8}) {
    Tensor x = Tensor::full({k}, 0.37);
    Tensor s = softmax(x);
    for (int i = 0; i < k; ++i) CHECK(s.data()[i] == doctest::Approx(1.0 / k).epsilon(1e-12));
  }
}

TEST_CASE("softmax axis 0 matches transposed axis 1") {
  CounterRng rng(3);
  Tensor x = random_tensor({4, 6}, rng);
  Tensor a = softmax(x, 0);
  Tensor b = transpose(softmax(transpose(x), 1));
  for (int i = 0; i < 24; ++i) CHECK(a.data()[i] == doctest::Approx(b.data()[i]).epsilon(1e-15));
}

TEST_CASE("layer_norm rows have mean 0 variance 1 before affine") {
  CounterRng rng(11);
  Tensor x = random_tensor({5, 16}, rng, -3.0, 5.0);
  Tensor gamma = Tensor::full({16}, 1.0);
  Tensor beta = Tensor::zeros({16});
  Tensor y = layer_norm(x, gamma, beta);
  for (int i = 0; i < 5; ++i) {
    double mean = 0.0, var = 0.0;
    for (int j = 0; j < 16; ++j) mean += y.data()[i * 16 + j];
    mean /= 16;
    for (int j = 0; j < 16; ++j) {
      const double d = y.data()[i * 16 + j] - mean;
      var += d * d;
    }
    var /= 16;
    CHECK(std::fabs(mean) < 1e-9);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("parallel kernels match serial reference bit for bit") {
  CounterRng rng(23);
  const int n = 37, k = 53, m = 29;
  std::vector<double> a(n * k), b(k * m);
  for (auto& v : a) v = rng.uniform(-2, 2);
  for (auto& v : b) v = rng.uniform(-2, 2);
  std::vector<double> c_par(n * m), c_ser(n * m);
  kernels::matmul(a.data(), b.data(), c_par.data(), n, k, m);
  kernels::matmul_serial(a.data(), b.data(), c_ser.data(), n, k, m);
  CHECK(c_par == c_ser);

  std::vector<double> big(100000);
  for (auto& v : big) v = rng.uniform(-1, 1);
  CHECK(kernels::reduce_sum(big.data(), big.size()) ==
        kernels::reduce_sum_serial(big.data(), big.size()));

  std::vector<double> sm_in(64 * 128), sm_a(64 * 128), sm_b(64 * 128);
  for (auto& v : sm_in) v = rng.uniform(-4, 4);
  kernels::softmax_rows(sm_in.data(), sm_a.data(), 64, 128);
  kernels::softmax_rows_serial(sm_in.data(), sm_b.data(), 64, 128);
  CHECK(sm_a == sm_b);
}

TEST_CASE("backward: sum gives ones, x*x gives 2x") {
  Tensor x = Tensor({3}, {1.0, 2.0, 3.0});
  {
    Tape tape;
    tape.watch(x);
    Tensor loss = sum_all(x);
    tape.backward(loss);
    for (int i = 0; i < 3; ++i) CHECK(x.grad()[i] == 1.0);
  }
  Tensor z = Tensor::scalar(3.0);
  {
    Tape tape;
    z.zero_grad();
    tape.watch(z);
    Tensor loss = sum_all(mul(z, z));
    tape.backward(loss);
    CHECK(z.grad()[0] == doctest::Approx(6.0));
  }
}

TEST_CASE("backward rejects non-scalar loss and foreign tensors") {
  Tensor x = Tensor({2}, {1.0, 2.0});
  Tape tape;
  tape.watch(x);
  Tensor y = mul(x, x);
  CHECK_THROWS_AS(tape.backward(y), ShapeError);
  Tape other;
  Tensor c = Tensor::scalar(1.0);
  CHECK_THROWS_AS(other.backward(c), InvariantError);
}

TEST_CASE("gradient check: elementwise chain") {
  CounterRng rng(101);
  Tensor a = random_tensor({4, 3}, rng);
  Tensor b = random_tensor({4, 3}, rng, 0.5, 2.0);
  ParamRefs params{{"a", &a}, {"b", &b}};
  auto loss = [&](Tape* tape) {
    if (tape) watch_all(*tape, params);
    Tensor t = mul(gelu(a), sigmoid(b));
    t = add(t, softplus(sub(a, b)));
    t = divide(t, add_scalar(square(b), 1.0));
    return sum_all(mul(t, t));
  };
  auto result = check_gradients(loss, params, rng, 8);
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("gradient check: matmul softmax layer_norm slice concat") {
  CounterRng rng(202);
  Tensor w1 = random_tensor({6, 8}, rng);
  Tensor w2 = random_tensor({8, 4}, rng);
  Tensor gamma = random_tensor({8}, rng, 0.5, 1.5);
  Tensor beta = random_tensor({8}, rng, -0.2, 0.2);
  Tensor x = random_tensor({5, 6}, rng);
  ParamRefs params{{"w1", &w1}, {"w2", &w2}, {"gamma", &gamma}, {"beta", &beta}, {"x", &x}};
  auto loss = [&](Tape* tape) {
    if (tape) watch_all(*tape, params);
    Tensor h = matmul(x, w1);
    h = layer_norm(h, gamma, beta);
    Tensor s = softmax(h, 1);
    Tensor top = slice(s, 0, 0, 2);
    Tensor bottom = slice(s, 0, 2, 3);
    Tensor joined = concat({top, bottom}, 0);
    Tensor out = matmul(joined, w2);
    return sum_all(square(out));
  };
  auto result = check_gradients(loss, params, rng, 6);
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("gradient check: gather transpose wrap abs log exp") {
  CounterRng rng(303);
  Tensor table = random_tensor({10, 4}, rng);
  Tensor y = random_tensor({3, 4}, rng, 0.2, 3.0);
  ParamRefs params{{"table", &table}, {"y", &y}};
  auto loss = [&](Tape* tape) {
    if (tape) watch_all(*tape, params);
    Tensor rows = gather_rows(table, {7, 2, 7});
    Tensor t = mul(rows, log_op(y));
    t = add(t, wrap_angle_op(scale(rows, 2.5)));
    t = add(t, abs_op(transpose(transpose(t))));
    return mean_all(add(exp_op(scale(t, 0.1)), tanh_op(t)));
  };
  auto result = check_gradients(loss, params, rng, 8);
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("property: gradient check over random op stacks") {
  CounterRng rng(404);
  for (int trial = 0; trial < 12; ++trial) {
    const int rows = rng.uniform_int(1, 6);
    const int cols = rng.uniform_int(1, 6);
    Tensor a = random_tensor({rows, cols}, rng);
    Tensor b = random_tensor({cols, rng.uniform_int(1, 6)}, rng);
    ParamRefs params{{"a", &a}, {"b", &b}};
    auto loss = [&](Tape* tape) {
      if (tape) watch_all(*tape, params);
      Tensor h = matmul(gelu(a), b);
      h = softmax(h, 1);
      Tensor pooled = mean_axis(h, 0);
      return sum_all(square(pooled));
    };
    auto result = check_gradients(loss, params, rng, 4);
    CHECK(result.max_rel_err < 1e-4);
  }
}

TEST_CASE("multi-head attention: single key attends fully") {
  CounterRng rng(55);
  MultiHeadAttention mha(8, 8, 2, rng);
  Tensor q = random_tensor({3, 8}, rng);
  Tensor kv = random_tensor({1, 8}, rng);
  Tensor out = mha.forward(q, kv, kv);
  // With one key the attention weights are exactly 1, so every query row maps
  // to wo(value-projection of that key row).
  Tensor expected = mha.wo.forward(mha.wv.forward(kv));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(out.data()[i * 8 + j] == doctest::Approx(expected.data()[j]).epsilon(1e-12));
}

TEST_CASE("multi-head attention: causal mask position 0 sees only itself") {
  CounterRng rng(56);
  MultiHeadAttention mha(8, 8, 2, rng);
  Tensor x = random_tensor({4, 8}, rng);
  Tensor mask = causal_mask(4);
  Tensor out = mha.forward(x, x, x, &mask);
  Tensor first = slice(x, 0, 0, 1);
  Tensor alone = mha.forward(first, first, first);
  for (int j = 0; j < 8; ++j)
    CHECK(out.data()[j] == doctest::Approx(alone.data()[j]).epsilon(1e-12));
}

TEST_CASE("multi-head attention matches loop-based reference evaluator") {
  CounterRng rng(57);
  const int n = 4, m = 6, d = 8, heads = 2, dh = d / heads;
  MultiHeadAttention mha(d, d, heads, rng);
  Tensor q = random_tensor({n, d}, rng);
  Tensor kv = random_tensor({m, d}, rng);
  Tensor out = mha.forward(q, kv, kv);

  // Straightforward loop evaluation of scaled dot-product attention.
  auto lin = [&](const Tensor& w, const Tensor& b, const Tensor& x, int r, int c) {
    std::vector<double> y(static_cast<std::size_t>(r) * c, 0.0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        double acc = b.data()[j];
        for (int k2 = 0; k2 < x.dim(1); ++k2)
          acc += x.data()[i * x.dim(1) + k2] * w.data()[k2 * c + j];
        y[static_cast<std::size_t>(i) * c + j] = acc;
      }
    return y;
  };
  auto qp = lin(mha.wq.w, mha.wq.b, q, n, d);
  auto kp = lin(mha.wk.w, mha.wk.b, kv, m, d);
  auto vp = lin(mha.wv.w, mha.wv.b, kv, m, d);
  std::vector<double> concat_out(static_cast<std::size_t>(n) * d, 0.0);
  for (int h = 0; h < heads; ++h) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> logits(m);
      double mx = -1e300;
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k2 = 0; k2 < dh; ++k2)
          acc += qp[i * d + h * dh + k2] * kp[j * d + h * dh + k2];
        logits[j] = acc / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, logits[j]);
      }
      double denom = 0.0;
      for (int j = 0; j < m; ++j) denom += std::exp(logits[j] - mx);
      for (int k2 = 0; k2 < dh; ++k2) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j)
          acc += std::exp(logits[j] - mx) / denom * vp[j * d + h * dh + k2];
        concat_out[static_cast<std::size_t>(i) * d + h * dh + k2] = acc;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = mha.wo.b.data()[j];
      for (int k2 = 0; k2 < d; ++k2) acc += concat_out[i * d + k2] * mha.wo.w.data()[k2 * d + j];
      CHECK(std::fabs(out.data()[i * d + j] - acc) < 1e-10);
    }
}

TEST_CASE("gradient check through attention and transformer block") {
  CounterRng rng(66);
  TransformerBlock block(8, 16, 2, rng);
  Tensor x = random_tensor({5, 8}, rng);
  ParamRefs params;
  block.collect("block", params);
  params.push_back({"x", &x});
  Tensor mask = causal_mask(5);
  auto loss = [&](Tape* tape) {
    if (tape) watch_all(*tape, params);
    return sum_all(square(block.forward(x, &mask)));
  };
  auto result = check_gradients(loss, params, rng, 4);
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("adamw: zero grad and zero decay leaves params unchanged") {
  std::vector<double> p{1.0, -2.0}, g{0.0, 0.0}, m{0.0, 0.0}, v{0.0, 0.0};
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(p, g, m, v, 1, cfg);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
}

TEST_CASE("adamw: one step on x^2 moves toward zero") {
  std::vector<double> p{1.0}, m{0.0}, v{0.0};
  std::vector<double> g{2.0};  // d/dx x^2 at x=1
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(p, g, m, v, 1, cfg);
  CHECK(p[0] < 1.0);
  CHECK(p[0] > 0.0);
}

TEST_CASE("adamw: 200 steps on 2-d quadratic converges below 1e-3") {
  Tensor x = Tensor({2}, {1.0, -0.7});
  ParamRefs params{{"x", &x}};
  AdamWConfig cfg;
  cfg.lr = 0.05;
  cfg.weight_decay = 0.0;
  AdamW opt(params, cfg);
  for (int step = 0; step < 200; ++step) {
    opt.zero_grad();
    Tape tape;
    watch_all(tape, params);
    Tensor loss = sum_all(square(x));
    tape.backward(loss);
    opt.step();
  }
  CHECK(std::fabs(x.values()[0]) < 1e-3);
  CHECK(std::fabs(x.values()[1]) < 1e-3);
}

TEST_CASE("adamw: rejects non-positive learning rate") {
  std::vector<double> p{1.0}, g{1.0}, m{0.0}, v{0.0};
  AdamWConfig cfg;
  cfg.lr = 0.0;
  CHECK_THROWS_AS(adamw_step(p, g, m, v, 1, cfg), InvariantError);
}

TEST_CASE("ops are deterministic across repeated evaluation") {
  CounterRng rng(77);
  Tensor a = random_tensor({16, 16}, rng);
  Tensor b = random_tensor({16, 16}, rng);
  Tensor r1 = matmul(gelu(a), softmax(b, 1));
  Tensor r2 = matmul(gelu(a), softmax(b, 1));
  CHECK(r1.values() == r2.values());
}

TEST_CASE("checkpoint round-trip is bitwise and validates names/shapes") {
  CounterRng rng(88);
  Linear l1(6, 4, rng);
  Linear l2(4, 2, rng);
  ParamRefs params;
  l1.collect("enc.l1", params);
  l2.collect("enc.l2", params);
  const std::string path = "test_ckpt_nn.gdck";
  save_checkpoint(path, params);
  const uint64_t h_before = params_hash(params);

  for (const auto& p : params)
    for (auto& v : p.tensor->values()) v = 0.0;
  load_checkpoint(path, params);
  CHECK(params_hash(params) == h_before);

  Linear wrong(5, 4, rng);
  ParamRefs bad;
  wrong.collect("enc.l1", bad);
  CHECK_THROWS(load_checkpoint(path, bad));
  std::remove(path.c_str());
}

TEST_CASE("tape: independent tapes on shared constants do not interfere") {
  CounterRng rng(99);
  Tensor shared_const = random_tensor({3, 3}, rng);
  Tensor w1 = random_tensor({3, 3}, rng);
  Tensor w2 = random_tensor({3, 3}, rng);
  Tape t1, t2;
  t1.watch(w1);
  t2.watch(w2);
  Tensor l1 = sum_all(matmul(shared_const, w1));
  Tensor l2 = sum_all(matmul(shared_const, w2));
  t1.backward(l1);
  t2.backward(l2);
  CHECK(w1.grad().size() == 9);
  CHECK(w2.grad().size() == 9);
}
