#pragma once

#include <cstddef>

namespace srea::nn {

inline constexpr double kInitialLearningRate = 0.01;
inline constexpr int kHalvingPeriod = 20;
inline constexpr std::size_t kMaxBatchSize = 128;
inline constexpr int kDefaultEpochs = 100;

/// 0.01 halved every 20 epochs.
double lr_at(int epoch);

/// min(n / 10, 128), floored at 1.
std::size_t batch_size_for(std::size_t n);

}  // namespace srea::nn
