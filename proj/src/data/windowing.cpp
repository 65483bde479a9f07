#include "srea/data/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srea::data {

std::vector<double> block_mean(std::span<const double> values, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("block_mean: factor must be positive");
  std::vector<double> out(values.size() / factor);
  for (std::size_t b = 0; b < out.size(); ++b) {
    double s = 0.0;
    for (std::size_t j = 0; j < factor; ++j) s += values[b * factor + j];
    out[b] = s / static_cast<double>(factor);
  }
  return out;
}

int power_level(double mean_power, double p_max, std::size_t levels) {
  if (!(p_max > 0.0)) throw std::invalid_argument("power_level: p_max must be positive");
  if (levels < 2) throw std::invalid_argument("power_level: need at least 2 levels");
  const double raw = std::floor(static_cast<double>(levels) * mean_power / p_max);
  const double top = static_cast<double>(levels - 1);
  return static_cast<int>(std::clamp(raw, 0.0, top));
}

std::size_t window_count(std::size_t length, std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0) {
    throw std::invalid_argument("window length and stride must be positive");
  }
  if (length < window_len) return 0;
  return (length - window_len) / stride + 1;
}

Dataset windowize(const Series& series, const WindowingConfig& cfg,
                  std::string_view power_channel) {
  if (cfg.levels < 2) throw std::invalid_argument("windowize: need at least 2 levels");
  if (cfg.input_channels.empty()) throw std::invalid_argument("windowize: no input channels");

  std::vector<std::vector<double>> inputs;
  for (const auto& name : cfg.input_channels) {
    inputs.push_back(block_mean(series.channel(name), cfg.resample_factor));
  }
  const std::vector<double> power = block_mean(series.channel(power_channel), cfg.resample_factor);
  const std::size_t count = window_count(power.size(), cfg.window_len, cfg.stride);
  if (count == 0) {
    throw std::invalid_argument("series of " + std::to_string(power.size()) +
                                " resampled steps is shorter than one window of " +
                                std::to_string(cfg.window_len));
  }

  Dataset out;
  out.name = "CHP";
  out.channels = inputs.size();
  out.length = cfg.window_len;
  out.num_classes = cfg.levels;
  for (std::size_t j = 0; j < cfg.levels; ++j) out.class_names.push_back("level" + std::to_string(j));
  out.samples.reserve(count * out.channels * out.length);
  out.labels.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * cfg.stride;
    for (const auto& column : inputs) {
      for (std::size_t t = 0; t < cfg.window_len; ++t) {
        out.samples.push_back(static_cast<float>(column[start + t]));
      }
    }
    double mean = 0.0;
    for (std::size_t t = 0; t < cfg.window_len; ++t) mean += power[start + t];
    mean /= static_cast<double>(cfg.window_len);
    out.labels.push_back(power_level(mean, cfg.p_max, cfg.levels));
  }
  return out;
}

}  // namespace srea::data
