#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srea/eval/friedman.hpp"

namespace srea::testing {

/// Exact two-sided Mann-Whitney p-value by enumerating every assignment of
/// the pooled (tie-free) ranks to group a: 2 * min(P(U <= u), P(U >= u)).
inline double enumerated_mwu_p(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  std::vector<double> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<double>(r + 1);
  double observed = 0.0;
  for (std::size_t i = 0; i < na; ++i) observed += rank[i];
  observed -= static_cast<double>(na * (na + 1)) / 2.0;

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(na), true);
  double total = 0, le = 0, ge = 0;
  do {
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) u += static_cast<double>(i + 1);
    }
    u -= static_cast<double>(na * (na + 1)) / 2.0;
    total += 1;
    if (u <= observed + 1e-9) le += 1;
    if (u >= observed - 1e-9) ge += 1;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

/// Mean ranks (best = 1, midranks on ties) by counting, per condition,
/// how many algorithms score strictly higher and how many tie.
inline std::vector<double> brute_force_mean_ranks(const eval::ScoreMatrix& m) {
  const std::size_t k = m.algorithms.size(), n = m.conditions.size();
  std::vector<double> ranks(k, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < k; ++i) {
      double higher = 0, ties = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        if (m.scores[j][c] > m.scores[i][c]) higher += 1;
        if (m.scores[j][c] == m.scores[i][c]) ties += 1;
      }
      ranks[i] += 1.0 + higher + ties / 2.0;
    }
  }
  for (auto& r : ranks) r /= static_cast<double>(n);
  return ranks;
}

/// Friedman statistic straight from the mean ranks.
inline double friedman_chi2_formula(const std::vector<double>& mean_ranks, std::size_t n_conditions) {
  const double k = static_cast<double>(mean_ranks.size());
  const double n = static_cast<double>(n_conditions);
  double s = 0.0;
  for (double r : mean_ranks) s += r * r;
  return 12.0 * n / (k * (k + 1.0)) * (s - k * (k + 1.0) * (k + 1.0) / 4.0);
}

/// 3 algorithms x 4 conditions, worked by hand: ranks (1,2,1,1), (2,1,3,2),
/// (3,3,2,3); mean ranks 1.25, 2, 2.75; chi2 = 4 * (13.125 - 12) = 4.5;
/// Iman-Davenport F = 3 * 4.5 / (8 - 4.5); p(chi2, 2 df) = exp(-2.25).
inline eval::ScoreMatrix worked_example() {
  eval::ScoreMatrix m;
  m.algorithms = {"A", "B", "C"};
  m.conditions = {"c1", "c2", "c3", "c4"};
  m.scores = {{0.90, 0.80, 0.70, 0.95}, {0.80, 0.85, 0.60, 0.90}, {0.70, 0.60, 0.65, 0.80}};
  return m;
}

inline constexpr double kWorkedChi2 = 4.5;
inline constexpr double kWorkedF = 13.5 / 3.5;

}  // namespace srea::testing
