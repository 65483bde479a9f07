#include "srea/noise/transition.hpp"

#include <cmath>

#include "srea/core/record_io.hpp"

namespace srea::noise {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::symmetric:
      return "symmetric";
    case NoiseKind::asymmetric:
      return "asymmetric";
    case NoiseKind::flip:
      return "flip";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "symmetric") return NoiseKind::symmetric;
  if (name == "asymmetric") return NoiseKind::asymmetric;
  if (name == "flip" || name == "pair") return NoiseKind::flip;
  throw std::invalid_argument("unknown noise type '" + std::string(name) +
                              "' (expected symmetric, asymmetric or flip)");
}

TransitionMatrix::TransitionMatrix(NoiseKind kind, std::size_t k, double epsilon,
                                   std::vector<double> rows)
    : kind_(kind), k_(k), epsilon_(epsilon), rows_(std::move(rows)) {
  if (rows_.size() != k_ * k_) {
    throw std::invalid_argument("transition matrix needs k*k entries");
  }
}

namespace {

void check_arguments(std::size_t k, double epsilon) {
  if (k < 2) {
    throw std::invalid_argument("transition matrix needs k >= 2 classes, got " +
                                std::to_string(k));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("noise ratio must lie in [0, 1], got " + std::to_string(epsilon));
  }
}

}  // namespace

TransitionMatrix build_symmetric(std::size_t k, double epsilon) {
  check_arguments(k, epsilon);
  const double off = epsilon / static_cast<double>(k - 1);
  std::vector<double> rows(k * k, off);
  for (std::size_t i = 0; i < k; ++i) rows[i * k + i] = 1.0 - epsilon;
  return TransitionMatrix(NoiseKind::symmetric, k, epsilon, std::move(rows));
}

TransitionMatrix build_asymmetric(std::size_t k, double epsilon) {
  check_arguments(k, epsilon);
  std::vector<double> rows(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    rows[i * k + i] = 1.0 - epsilon;
    rows[i * k + (i + 1) % k] += epsilon;
  }
  return TransitionMatrix(NoiseKind::asymmetric, k, epsilon, std::move(rows));
}

TransitionMatrix build_flip(std::size_t k, double epsilon) {
  check_arguments(k, epsilon);
  std::vector<double> rows(k * k, 0.0);
  rows[0] = 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    rows[i * k] = epsilon;
    rows[i * k + i] = 1.0 - epsilon;
  }
  return TransitionMatrix(NoiseKind::flip, k, epsilon, std::move(rows));
}

TransitionMatrix build_transition(NoiseKind kind, std::size_t k, double epsilon) {
  switch (kind) {
    case NoiseKind::symmetric:
      return build_symmetric(k, epsilon);
    case NoiseKind::asymmetric:
      return build_asymmetric(k, epsilon);
    case NoiseKind::flip:
      return build_flip(k, epsilon);
  }
  throw std::invalid_argument("unknown noise kind");
}

// ---------------------------------------------------------------------------

void CleanLabelOracle::check_size(std::span<const int> labels) const {
  if (labels.size() != clean_.size()) {
    throw std::invalid_argument("oracle holds " + std::to_string(clean_.size()) +
                                " labels, got " + std::to_string(labels.size()));
  }
}

std::size_t CleanLabelOracle::corrupted_count() const {
  std::size_t n = 0;
  for (bool c : corrupted_) n += c ? 1 : 0;
  return n;
}

double CleanLabelOracle::agreement(std::span<const int> labels) const {
  check_size(labels);
  if (clean_.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < clean_.size(); ++i) hits += labels[i] == clean_[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(clean_.size());
}

double CleanLabelOracle::restored_fraction(std::span<const int> labels) const {
  check_size(labels);
  std::size_t total = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < clean_.size(); ++i) {
    if (!corrupted_[i]) continue;
    ++total;
    hits += labels[i] == clean_[i] ? 1 : 0;
  }
  return total == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<int> CleanLabelOracle::correctness(std::span<const int> labels) const {
  check_size(labels);
  std::vector<int> out(clean_.size());
  for (std::size_t i = 0; i < clean_.size(); ++i) out[i] = labels[i] == clean_[i] ? 1 : 0;
  return out;
}

std::vector<std::size_t> CleanLabelOracle::confusion(std::span<const int> labels,
                                                     std::size_t k) const {
  check_size(labels);
  std::vector<std::size_t> counts(k * k, 0);
  for (std::size_t i = 0; i < clean_.size(); ++i) {
    const auto t = static_cast<std::size_t>(clean_[i]);
    const auto p = static_cast<std::size_t>(labels[i]);
    if (t >= k || p >= k) throw std::out_of_range("confusion: label outside [0, k)");
    ++counts[t * k + p];
  }
  return counts;
}

CleanLabelOracle CleanLabelOracle::subset(std::span<const std::size_t> indices) const {
  CleanLabelOracle out;
  out.clean_.reserve(indices.size());
  out.corrupted_.reserve(indices.size());
  for (std::size_t i : indices) {
    out.clean_.push_back(clean_.at(i));
    out.corrupted_.push_back(corrupted_.at(i));
  }
  return out;
}

void CleanLabelOracle::save(const std::filesystem::path& path) const {
  std::vector<float> clean(clean_.begin(), clean_.end());
  std::vector<float> flags(corrupted_.size());
  for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = corrupted_[i] ? 1.0f : 0.0f;
  core::write_record_file(path, {{"oracle.clean_labels", core::Shape{clean.size()}, clean},
                                 {"oracle.corrupted", core::Shape{flags.size()}, flags}});
}

CleanLabelOracle CleanLabelOracle::load(const std::filesystem::path& path) {
  auto records = core::read_record_file(path);
  const auto& clean = core::find_record(records, "oracle.clean_labels").values;
  const auto& flags = core::find_record(records, "oracle.corrupted").values;
  if (clean.size() != flags.size()) {
    throw core::FormatError("oracle file has mismatched record lengths");
  }
  CleanLabelOracle out;
  for (float v : clean) out.clean_.push_back(static_cast<int>(v));
  for (float v : flags) out.corrupted_.push_back(v != 0.0f);
  return out;
}

CleanLabelOracle make_oracle(std::vector<int> clean, std::vector<int> given) {
  if (clean.size() != given.size()) {
    throw std::invalid_argument("make_oracle: clean and given label counts differ");
  }
  CleanLabelOracle out;
  out.corrupted_.resize(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) out.corrupted_[i] = clean[i] != given[i];
  out.clean_ = std::move(clean);
  return out;
}

Corruption corrupt(std::span<const int> labels, const TransitionMatrix& transition,
                   core::Rng& rng) {
  const std::size_t k = transition.num_classes();
  Corruption result;
  result.labels.resize(labels.size());
  result.flipped.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw std::out_of_range("corrupt: label " + std::to_string(y) + " at position " +
                              std::to_string(i) + " is outside [0, " + std::to_string(k) + ")");
    }
    auto row = transition.row(static_cast<std::size_t>(y));
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t drawn = k;
    for (std::size_t j = 0; j < k; ++j) {
      cumulative += row[j];
      if (u < cumulative) {
        drawn = j;
        break;
      }
    }
    if (drawn == k) {
      // u landed in the rounding slack above the cumulative sum; take the
      // last class with positive probability.
      for (std::size_t j = k; j-- > 0;) {
        if (row[j] > 0.0) {
          drawn = j;
          break;
        }
      }
    }
    result.labels[i] = static_cast<int>(drawn);
    result.flipped[i] = result.labels[i] != y;
  }
  result.oracle = make_oracle(std::vector<int>(labels.begin(), labels.end()), result.labels);
  return result;
}

}  // namespace srea::noise
