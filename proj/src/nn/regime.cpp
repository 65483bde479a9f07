#include "srea/nn/regime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srea::nn {

double lr_at(int epoch) {
  if (epoch < 0) {
    throw std::invalid_argument("lr_at: negative epoch");
  }
  return kInitialLearningRate * std::ldexp(1.0, -(epoch / kHalvingPeriod));
}

std::size_t batch_size_for(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("batch_size_for: empty dataset");
  }
  return std::max<std::size_t>(1, std::min(n / 10, kMaxBatchSize));
}

}  // namespace srea::nn
