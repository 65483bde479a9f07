#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace srea::eval {

/// Mean score of each algorithm (row) on each condition (column); higher is
/// better.
struct ScoreMatrix {
  std::vector<std::string> algorithms;
  std::vector<std::string> conditions;
  std::vector<std::vector<double>> scores;  // [algorithm][condition]

  /// Throws std::invalid_argument on missing cells or non-finite scores.
  void validate() const;
};

struct FriedmanResult {
  std::vector<double> mean_ranks;  // rank 1 = best, midranks on ties
  double chi2 = 0.0;               // Friedman statistic, k - 1 degrees of freedom
  double f_stat = 0.0;             // Iman-Davenport F, (k-1, (k-1)(N-1)) degrees of freedom
  double p_chi2 = 1.0;
  double p_f = 1.0;
  std::vector<std::string> warnings;
};

/// Ranks within each condition, best score first.
std::vector<std::vector<double>> condition_ranks(const ScoreMatrix& scores);

/// Requires at least 3 algorithms and 2 conditions; warns below 5 conditions.
FriedmanResult friedman_test(const ScoreMatrix& scores);

}  // namespace srea::eval
