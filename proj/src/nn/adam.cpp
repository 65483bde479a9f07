#include "srea/nn/adam.hpp"

#include <cmath>

namespace srea::nn {

Adam::Adam(std::vector<core::TensorF> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  state_.reserve(params_.size());
  for (const auto& p : params_) {
    State s;
    s.m.assign(p.size(), 0.0f);
    s.v.assign(p.size(), 0.0f);
    state_.push_back(std::move(s));
  }
}

void Adam::step(double lr) {
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double wd = config_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (!p.has_grad()) continue;
    auto& s = state_[i];
    ++s.steps;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(s.steps));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(s.steps));
    auto w = p.mutable_values();
    auto g = p.grad();
    for (std::size_t j = 0; j < w.size(); ++j) {
      double grad = g[j];
      double value = w[j];
      if (config_.decoupled) {
        value -= lr * wd * value;
      } else {
        grad += wd * value;
      }
      const double m = b1 * s.m[j] + (1.0 - b1) * grad;
      const double v = b2 * s.v[j] + (1.0 - b2) * grad * grad;
      s.m[j] = static_cast<float>(m);
      s.v[j] = static_cast<float>(v);
      value -= lr * (m / c1) / (std::sqrt(v / c2) + config_.eps);
      w[j] = static_cast<float>(value);
    }
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.clear_grad();
}

}  // namespace srea::nn
