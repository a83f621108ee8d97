#pragma once

#include <vector>

#include "gdplan/nn/layers.hpp"

namespace gdplan::nn {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// One decoupled-weight-decay Adam update on raw buffers. step starts at 1.
void adamw_step(std::vector<double>& param, const std::vector<double>& grad,
                std::vector<double>& m, std::vector<double>& v, int64_t step,
                const AdamWConfig& cfg);

class AdamW {
 public:
  AdamW(ParamRefs params, AdamWConfig cfg);

  void step();       // consumes each param's grad buffer
  void zero_grad();
  int64_t steps_taken() const { return t_; }

  // Parameters whose names appear here are skipped by step().
  void freeze(const std::vector<std::string>& name_prefixes);

 private:
  ParamRefs params_;
  AdamWConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::vector<bool> frozen_;
  int64_t t_ = 0;
};

}  // namespace gdplan::nn
