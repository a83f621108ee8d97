#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gdplan/nn/layers.hpp"
#include "gdplan/nn/ops.hpp"
#include "gdplan/nn/rng.hpp"

namespace gdplan::testutil {

// Central finite-difference gradient check. `make_loss` must rebuild the loss
// from the current parameter values; it receives a tape when the analytic
// gradients are wanted and nullptr for plain (re-)evaluations. For each
// parameter a random subset of coordinates is probed.
struct GradCheck {
  double max_rel_err = 0.0;
  int checked = 0;
  std::string worst;
};

inline GradCheck check_gradients(const std::function<nn::Tensor(nn::Tape*)>& make_loss,
                                 const nn::ParamRefs& params, nn::CounterRng& rng,
                                 int coords_per_param = 6, double eps = 1e-5) {
  nn::Tape tape;
  nn::zero_grads(params);
  nn::watch_all(tape, params);
  nn::Tensor loss = make_loss(&tape);
  tape.backward(loss);

  GradCheck result;
  for (const nn::ParamRef& p : params) {
    nn::Tensor& t = *p.tensor;
    const int n = static_cast<int>(t.size());
    const int probes = std::min(coords_per_param, n);
    for (int c = 0; c < probes; ++c) {
      const int idx = probes == n ? c : rng.uniform_int(0, n - 1);
      const double x0 = t.values()[static_cast<std::size_t>(idx)];
      const double h = eps * std::max(1.0, std::fabs(x0));

      t.values()[static_cast<std::size_t>(idx)] = x0 + h;
      const double f_plus = make_loss(nullptr).item();
      t.values()[static_cast<std::size_t>(idx)] = x0 - h;
      const double f_minus = make_loss(nullptr).item();
      t.values()[static_cast<std::size_t>(idx)] = x0;

      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = t.grad()[static_cast<std::size_t>(idx)];
      const double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-3});
      const double rel = std::fabs(numeric - analytic) / denom;
      ++result.checked;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst = p.name + "[" + std::to_string(idx) + "] analytic=" +
                       std::to_string(analytic) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

inline nn::Tensor random_tensor(nn::Shape shape, nn::CounterRng& rng, double lo = -1.0,
                                double hi = 1.0) {
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace gdplan::testutil
