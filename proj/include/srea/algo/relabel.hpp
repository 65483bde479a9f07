#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srea::algo {

inline constexpr std::size_t kEmaEpochs = 5;

/// Normalized weights for m stored epochs, oldest first: e^((j-5)/2) for
/// j = 6-m .. 5, the most recent epoch taking j = 5.
std::vector<double> ema_weights(std::size_t m);

/// Per-sample ring buffer of the classifier's softmax output over the last
/// kEmaEpochs epochs.
class EmaBuffer {
 public:
  EmaBuffer(std::size_t n, std::size_t k);

  std::size_t num_samples() const { return stored_.size(); }
  std::size_t num_classes() const { return k_; }
  std::size_t stored(std::size_t sample) const { return stored_.at(sample); }

  /// Records this epoch's probabilities for `sample`, evicting the oldest
  /// entry once kEmaEpochs are held.
  void push(std::size_t sample, std::span<const float> probs);

  /// Classifier pseudo-label y^c: EMA-weighted mean of the stored epochs.
  /// Requires at least one stored epoch.
  std::vector<double> pseudo_label(std::size_t sample) const;

 private:
  std::size_t k_;
  std::vector<float> slots_;        // n x kEmaEpochs x k
  std::vector<std::size_t> head_;   // next slot to write
  std::vector<std::size_t> stored_;
};

/// Weighted mean of `history` (oldest first, at most kEmaEpochs rows of k
/// entries) with ema_weights.
std::vector<double> classifier_pseudo_label(std::span<const std::vector<double>> history);

/// Cluster pseudo-label y^cc: softmax of negated Euclidean distances from
/// `embedding` (d values) to each center. `centers` is [d x k] row-major.
std::vector<double> cluster_pseudo_label(std::span<const float> embedding,
                                         std::span<const float> centers, std::size_t k);

/// argmax((1 - w) * onehot(given) + w * (y_c + y_cc)). An empty y_cc is
/// left out of the sum; `halve` averages the two pseudo-labels instead of
/// adding them. Ties go to the given class, then to the lowest index.
int correct_label(int given, std::span<const double> y_c, std::span<const double> y_cc, double w,
                  bool halve = false);

}  // namespace srea::algo
