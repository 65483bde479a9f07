#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srea/data/dataset.hpp"
#include "srea/data/series.hpp"

namespace srea::data {

struct WindowingConfig {
  std::size_t window_len = 36;
  std::size_t stride = 1;
  std::size_t resample_factor = 10;
  std::size_t levels = 5;
  double p_max = 50.0;
  std::vector<std::string> input_channels{"P_tot", "T_water", "T_amb"};
};

/// Means of consecutive blocks of `factor` values; a trailing partial block
/// is dropped.
std::vector<double> block_mean(std::span<const double> values, std::size_t factor);

/// Power level of a window mean: floor(levels * mean / p_max), clamped to
/// [0, levels - 1].
int power_level(double mean_power, double p_max, std::size_t levels);

std::size_t window_count(std::size_t length, std::size_t window_len, std::size_t stride);

/// Resamples every channel, then cuts windows over cfg.input_channels. Each
/// window is labeled by the level of the mean of `power_channel` over it.
Dataset windowize(const Series& series, const WindowingConfig& cfg,
                  std::string_view power_channel = "P_CHP");

}  // namespace srea::data
