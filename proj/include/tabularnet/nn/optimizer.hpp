#pragma once

#include <cmath>

#include "tabularnet/nn/layers.hpp"

namespace tabularnet::nn {

struct AdamWConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-5;
};

/// AdamW with decoupled weight decay: the decay term multiplies the weights
/// directly and never enters the moment estimates.
class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  void step(ParamStore& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (Parameter& p : params.all()) {
      Tensor& w = p.var.node->value;
      Tensor& g = p.var.grad();
      for (std::int64_t i = 0; i < w.numel(); ++i) {
        w[i] -= cfg_.lr * cfg_.weight_decay * w[i];
        p.m[i] = cfg_.beta1 * p.m[i] + (1.0 - cfg_.beta1) * g[i];
        p.v[i] = cfg_.beta2 * p.v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
        const double m_hat = p.m[i] / bc1;
        const double v_hat = p.v[i] / bc2;
        w[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
      }
    }
  }

  long step_count() const { return t_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  AdamWConfig cfg_;
  long t_ = 0;
};

}  // namespace tabularnet::nn
