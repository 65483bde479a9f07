#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srea/core/rng.hpp"

namespace srea::noise {

enum class NoiseKind { symmetric, asymmetric, flip };

std::string_view to_string(NoiseKind kind);
/// Accepts "symmetric", "asymmetric", "flip" (and "pair" as an alias of flip).
NoiseKind parse_noise_kind(std::string_view name);

/// Row-stochastic k x k label-corruption matrix; entry (i, j) is the
/// probability that true class i is reported as class j.
class TransitionMatrix {
 public:
  TransitionMatrix(NoiseKind kind, std::size_t k, double epsilon, std::vector<double> rows);

  NoiseKind kind() const { return kind_; }
  std::size_t num_classes() const { return k_; }
  double epsilon() const { return epsilon_; }
  double operator()(std::size_t from, std::size_t to) const { return rows_[from * k_ + to]; }
  std::span<const double> row(std::size_t from) const {
    return std::span<const double>(rows_).subspan(from * k_, k_);
  }
  const std::vector<double>& data() const { return rows_; }

 private:
  NoiseKind kind_;
  std::size_t k_;
  double epsilon_;
  std::vector<double> rows_;
};

/// T_ii = 1 - eps, T_ij = eps / (k - 1).
TransitionMatrix build_symmetric(std::size_t k, double epsilon);
/// T_ii = 1 - eps, T_i,(i+1 mod k) = eps.
TransitionMatrix build_asymmetric(std::size_t k, double epsilon);
/// Row 0 is the identity row; rows j >= 1 put eps on class 0 and 1 - eps on j.
TransitionMatrix build_flip(std::size_t k, double epsilon);
TransitionMatrix build_transition(NoiseKind kind, std::size_t k, double epsilon);

struct Corruption;

/// Holds the true labels of a corrupted set without exposing them. Only
/// agreement statistics can be read, so training code that receives the
/// oracle cannot consume the clean labels.
class CleanLabelOracle {
 public:
  CleanLabelOracle() = default;

  std::size_t size() const { return clean_.size(); }
  std::size_t corrupted_count() const;

  /// Fraction of positions where `labels` equals the truth.
  double agreement(std::span<const int> labels) const;
  /// Among positions whose given label was corrupted, the fraction where
  /// `labels` equals the truth.
  double restored_fraction(std::span<const int> labels) const;
  /// Per-position correctness of `labels` (1 = matches truth).
  std::vector<int> correctness(std::span<const int> labels) const;
  /// Confusion counts of `labels` against the truth: k x k, row = truth.
  std::vector<std::size_t> confusion(std::span<const int> labels, std::size_t k) const;

  CleanLabelOracle subset(std::span<const std::size_t> indices) const;

  void save(const std::filesystem::path& path) const;
  static CleanLabelOracle load(const std::filesystem::path& path);

 private:
  friend struct Corruption;
  friend Corruption corrupt(std::span<const int>, const TransitionMatrix&, core::Rng&);
  friend CleanLabelOracle make_oracle(std::vector<int> clean, std::vector<int> given);

  void check_size(std::span<const int> labels) const;

  std::vector<int> clean_;
  std::vector<bool> corrupted_;
};

struct Corruption {
  std::vector<int> labels;    // noisy labels handed to training
  std::vector<bool> flipped;  // labels[i] != truth[i]
  CleanLabelOracle oracle;
};

/// Samples each label independently from its row of T.
Corruption corrupt(std::span<const int> labels, const TransitionMatrix& transition,
                   core::Rng& rng);

/// Wraps known clean/given label pairs (e.g. read back from disk).
CleanLabelOracle make_oracle(std::vector<int> clean, std::vector<int> given);

}  // namespace srea::noise
