#pragma once

#include <cstddef>
#include <vector>

#include "srea/core/tensor.hpp"

namespace srea::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-6;
  double weight_decay = 1e-4;
  /// true: decay applied to the parameters directly (AdamW style).
  /// false: decay added to the gradient before the moment updates.
  bool decoupled = true;
};

/// Adam with bias correction. Parameters whose gradient buffer is empty
/// (not reached by the last backward pass) are skipped entirely, moments
/// and decay included.
class Adam {
 public:
  Adam(std::vector<core::TensorF> params, AdamConfig config = {});

  void step(double lr);
  void zero_grad();

  const AdamConfig& config() const { return config_; }
  std::size_t step_count() const { return steps_; }
  std::size_t param_step_count(std::size_t index) const { return state_.at(index).steps; }
  const std::vector<float>& first_moment(std::size_t index) const { return state_.at(index).m; }
  const std::vector<float>& second_moment(std::size_t index) const { return state_.at(index).v; }

 private:
  struct State {
    std::vector<float> m;
    std::vector<float> v;
    std::size_t steps = 0;
  };
  std::vector<core::TensorF> params_;
  std::vector<State> state_;
  AdamConfig config_;
  std::size_t steps_ = 0;
};

}  // namespace srea::nn
