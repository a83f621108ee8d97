#include "gdplan/nn/optim.hpp"

#include <cmath>

namespace gdplan::nn {

void adamw_step(std::vector<double>& param, const std::vector<double>& grad,
                std::vector<double>& m, std::vector<double>& v, int64_t step,
                const AdamWConfig& cfg) {
  if (cfg.lr <= 0.0) throw InvariantError("adamw: learning rate must be positive");
  if (param.size() != grad.size())
    throw ShapeError("adamw: param/grad size mismatch " + std::to_string(param.size()) + " vs " +
                     std::to_string(grad.size()));
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * param[i]);
  }
}

AdamW::AdamW(ParamRefs params, AdamWConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  if (cfg_.lr <= 0.0) throw InvariantError("adamw: learning rate must be positive");
  m_.resize(params_.size());
  v_.resize(params_.size());
  frozen_.assign(params_.size(), false);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const std::size_t n = static_cast<std::size_t>(params_[i].tensor->size());
    m_[i].assign(n, 0.0);
    v_[i].assign(n, 0.0);
  }
}

void AdamW::step() {
  ++t_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (frozen_[i]) continue;
    Tensor& t = *params_[i].tensor;
    if (!t.has_grad()) continue;
    adamw_step(t.values(), t.grad(), m_[i], v_[i], t_, cfg_);
  }
}

void AdamW::zero_grad() {
  for (const ParamRef& p : params_) p.tensor->zero_grad();
}

void AdamW::freeze(const std::vector<std::string>& name_prefixes) {
  for (std::size_t i = 0; i < params_.size(); ++i)
    for (const std::string& prefix : name_prefixes)
      if (params_[i].name.rfind(prefix, 0) == 0) frozen_[i] = true;
}

}  // namespace gdplan::nn
