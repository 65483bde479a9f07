#pragma once

#include <vector>

#include "srea/data/dataset.hpp"

namespace srea::data {

inline constexpr double kStdFloor = 1e-8;

/// Per-channel affine map x -> (x - mean) / max(std, kStdFloor).
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Global per-channel mean and population standard deviation over every
/// sample and time step.
ChannelStats fit_channel_stats(const Dataset& dataset);
void apply_channel_stats(Dataset& dataset, const ChannelStats& stats);

/// Fits on `train`, then transforms both sets with the training statistics.
ChannelStats znormalize(Dataset& train, Dataset& test);
/// Fits and transforms a single set.
ChannelStats znormalize(Dataset& dataset);

}  // namespace srea::data
