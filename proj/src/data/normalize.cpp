#include "srea/data/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srea::data {

ChannelStats fit_channel_stats(const Dataset& dataset) {
  dataset.validate();
  if (dataset.size() == 0) throw std::invalid_argument("cannot fit statistics on an empty dataset");
  const std::size_t C = dataset.channels;
  const std::size_t L = dataset.length;
  ChannelStats stats{std::vector<double>(C, 0.0), std::vector<double>(C, 0.0)};
  const double count = static_cast<double>(dataset.size() * L);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto s = dataset.sample(i);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < L; ++t) stats.mean[c] += s[c * L + t];
    }
  }
  for (double& m : stats.mean) m /= count;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto s = dataset.sample(i);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < L; ++t) {
        const double d = s[c * L + t] - stats.mean[c];
        stats.stddev[c] += d * d;
      }
    }
  }
  for (double& v : stats.stddev) v = std::sqrt(v / count);
  return stats;
}

void apply_channel_stats(Dataset& dataset, const ChannelStats& stats) {
  const std::size_t C = dataset.channels;
  const std::size_t L = dataset.length;
  if (stats.mean.size() != C || stats.stddev.size() != C) {
    throw std::invalid_argument("channel statistics do not match the dataset's channel count");
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto s = dataset.mutable_sample(i);
    for (std::size_t c = 0; c < C; ++c) {
      const double scale = 1.0 / std::max(stats.stddev[c], kStdFloor);
      for (std::size_t t = 0; t < L; ++t) {
        s[c * L + t] = static_cast<float>((s[c * L + t] - stats.mean[c]) * scale);
      }
    }
  }
}

ChannelStats znormalize(Dataset& train, Dataset& test) {
  ChannelStats stats = fit_channel_stats(train);
  apply_channel_stats(train, stats);
  apply_channel_stats(test, stats);
  return stats;
}

ChannelStats znormalize(Dataset& dataset) {
  ChannelStats stats = fit_channel_stats(dataset);
  apply_channel_stats(dataset, stats);
  return stats;
}

}  // namespace srea::data
