#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace srea::eval {

struct F1Report {
  double macro = 0.0;
  std::vector<double> per_class;
  /// Classes absent from both predictions and truth; their F1 counts as 0.
  std::vector<int> empty_classes;
  std::vector<std::string> warnings;
};

/// Per-class F1 = 2TP / (2TP + FP + FN), averaged over all k classes.
F1Report f1_report(std::span<const int> pred, std::span<const int> truth, std::size_t k);
double macro_f1(std::span<const int> pred, std::span<const int> truth, std::size_t k);

struct ConfusionMatrix {
  std::size_t k = 0;
  std::vector<std::size_t> counts;  // k x k, row = truth, column = prediction
  std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * k + pred]; }
  /// Row-normalized percentages (rows without samples are all zero).
  std::vector<double> row_percentages() const;
  /// "truth,pred0,...,pred{k-1}" header, then one row of counts per class.
  std::string to_csv() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> pred, std::span<const int> truth,
                                 std::size_t k);

double accuracy(std::span<const int> pred, std::span<const int> truth);

}  // namespace srea::eval
