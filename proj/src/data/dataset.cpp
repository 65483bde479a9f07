#include "srea/data/dataset.hpp"

#include <stdexcept>

#include "srea/core/record_io.hpp"

namespace srea::data {

std::span<const float> Dataset::sample(std::size_t i) const {
  return std::span<const float>(samples).subspan(i * sample_size(), sample_size());
}

std::span<float> Dataset::mutable_sample(std::size_t i) {
  return std::span<float>(samples).subspan(i * sample_size(), sample_size());
}

void Dataset::validate() const {
  if (channels == 0 || length == 0) {
    throw std::invalid_argument("dataset '" + name + "' has an empty sample shape");
  }
  if (samples.size() != labels.size() * sample_size()) {
    throw std::invalid_argument("dataset '" + name + "': " + std::to_string(samples.size()) +
                                " values do not form " + std::to_string(labels.size()) +
                                " samples of " + std::to_string(channels) + "x" +
                                std::to_string(length));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw std::invalid_argument("dataset '" + name + "': label " + std::to_string(labels[i]) +
                                  " of sample " + std::to_string(i) + " is outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
  }
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw std::invalid_argument("dataset '" + name + "': class name count differs from k");
  }
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) ++counts.at(static_cast<std::size_t>(y));
  return counts;
}

std::vector<int> Dataset::missing_classes() const {
  std::vector<int> out;
  auto counts = class_counts();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) out.push_back(static_cast<int>(j));
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.channels = channels;
  out.length = length;
  out.num_classes = num_classes;
  out.class_names = class_names;
  out.samples.reserve(indices.size() * sample_size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw std::out_of_range("dataset subset index out of range");
    auto s = sample(i);
    out.samples.insert(out.samples.end(), s.begin(), s.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

namespace {

constexpr const char* kNamePrefix = "dataset.name:";
constexpr const char* kClassPrefix = "dataset.class_name:";

}  // namespace

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  dataset.validate();
  std::vector<core::Record> records;
  records.push_back({"dataset.samples", core::Shape{dataset.size(), dataset.channels, dataset.length},
                     dataset.samples});
  std::vector<float> labels(dataset.labels.begin(), dataset.labels.end());
  records.push_back({"dataset.labels", core::Shape{labels.size()}, labels});
  records.push_back({"dataset.num_classes", core::Shape{1},
                     {static_cast<float>(dataset.num_classes)}});
  records.push_back({kNamePrefix + dataset.name, core::Shape{0}, {}});
  for (std::size_t j = 0; j < dataset.class_names.size(); ++j) {
    records.push_back(
        {kClassPrefix + std::to_string(j) + ":" + dataset.class_names[j], core::Shape{0}, {}});
  }
  core::write_record_file(path, records);
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto records = core::read_record_file(path);
  const auto& samples = core::find_record(records, "dataset.samples");
  const auto& labels = core::find_record(records, "dataset.labels");
  const auto& k = core::find_record(records, "dataset.num_classes");
  if (samples.shape.size() != 3 || labels.shape.size() != 1 || k.values.size() != 1 ||
      samples.shape[0] != labels.shape[0]) {
    throw core::FormatError("dataset cache '" + path.string() + "' has inconsistent records");
  }
  Dataset out;
  out.channels = samples.shape[1];
  out.length = samples.shape[2];
  out.num_classes = static_cast<std::size_t>(k.values[0]);
  out.samples = samples.values;
  for (float v : labels.values) out.labels.push_back(static_cast<int>(v));
  const std::string name_prefix = kNamePrefix;
  const std::string class_prefix = kClassPrefix;
  std::vector<std::pair<std::size_t, std::string>> names;
  for (const auto& r : records) {
    if (r.name.rfind(name_prefix, 0) == 0) {
      out.name = r.name.substr(name_prefix.size());
    } else if (r.name.rfind(class_prefix, 0) == 0) {
      std::string rest = r.name.substr(class_prefix.size());
      auto colon = rest.find(':');
      if (colon == std::string::npos) throw core::FormatError("bad class-name record");
      names.emplace_back(std::stoul(rest.substr(0, colon)), rest.substr(colon + 1));
    }
  }
  if (!names.empty()) {
    out.class_names.resize(out.num_classes);
    for (auto& [j, n] : names) out.class_names.at(j) = n;
  }
  out.validate();
  return out;
}

}  // namespace srea::data
