#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace srea::data {

/// Labeled, fixed-shape multichannel time series. Sample i occupies
/// samples[i*C*L, (i+1)*C*L) in channel-major order.
struct Dataset {
  std::string name;
  std::size_t channels = 1;
  std::size_t length = 0;
  std::size_t num_classes = 0;
  std::vector<float> samples;
  std::vector<int> labels;
  std::vector<std::string> class_names;  // optional, one per class

  std::size_t size() const { return labels.size(); }
  std::size_t sample_size() const { return channels * length; }
  std::span<const float> sample(std::size_t i) const;
  std::span<float> mutable_sample(std::size_t i);

  /// Throws std::invalid_argument when the arrays disagree with the shape
  /// fields or a label is outside [0, num_classes).
  void validate() const;

  std::vector<std::size_t> class_counts() const;
  /// Classes in [0, num_classes) with no sample.
  std::vector<int> missing_classes() const;

  Dataset subset(std::span<const std::size_t> indices) const;
};

/// Binary cache in the record format ("dataset.samples" [n x C x L],
/// "dataset.labels" [n], "dataset.num_classes" [1], plus name records).
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace srea::data
