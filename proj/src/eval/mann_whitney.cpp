#include "srea/eval/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace srea::eval {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::better:
      return "+";
    case Verdict::worse:
      return "-";
    case Verdict::similar:
      return "≈";
  }
  return "?";
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> mann_whitney_null_distribution(std::size_t n_a, std::size_t n_b) {
  // Counts of n_a-subsets of {1..N} by rank sum, built one element at a time.
  const std::size_t N = n_a + n_b;
  const std::size_t max_u = n_a * n_b;
  const std::size_t min_sum = n_a * (n_a + 1) / 2;
  const std::size_t max_sum = min_sum + max_u;
  std::vector<std::vector<double>> ways(n_a + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= N; ++r) {
    for (std::size_t j = std::min(r, n_a); j >= 1; --j) {
      auto& cur = ways[j];
      const auto& prev = ways[j - 1];
      for (std::size_t s = max_sum; s >= r; --s) cur[s] += prev[s - r];
    }
  }
  std::vector<double> dist(max_u + 1);
  double total = 0.0;
  for (std::size_t u = 0; u <= max_u; ++u) {
    dist[u] = ways[n_a][min_sum + u];
    total += dist[u];
  }
  for (double& p : dist) p /= total;
  return dist;
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha,
                         Alternative alternative, MwuMethod method) {
  if (a.size() < 3 || b.size() < 3) {
    throw std::invalid_argument("mann_whitney_u: each group needs at least 3 values, got " +
                                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  for (double v : a) {
    if (std::isnan(v)) throw std::invalid_argument("mann_whitney_u: NaN in group a");
  }
  for (double v : b) {
    if (std::isnan(v)) throw std::invalid_argument("mann_whitney_u: NaN in group b");
  }
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t N = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  MwuResult r;
  r.u_a = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;
  r.u_b = static_cast<double>(na * nb) - r.u_a;

  // Tie groups for the variance correction.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < N;) {
    std::size_t j = i;
    while (j + 1 < N && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) ties = true;
    tie_term += t * t * t - t;
    i = j + 1;
  }

  const double mean = static_cast<double>(na * nb) / 2.0;
  bool use_exact = false;
  switch (method) {
    case MwuMethod::automatic:
      use_exact = std::min(na, nb) <= 8 && !ties;
      break;
    case MwuMethod::exact:
      if (ties) throw std::invalid_argument("mann_whitney_u: exact method requires tie-free data");
      use_exact = true;
      break;
    case MwuMethod::normal:
      use_exact = false;
      break;
  }

  if (use_exact) {
    r.exact = true;
    const auto dist = mann_whitney_null_distribution(na, nb);
    const auto u = static_cast<std::size_t>(std::llround(r.u_a));
    double lower = 0.0;
    for (std::size_t v = 0; v <= u; ++v) lower += dist[v];
    double upper = 0.0;
    for (std::size_t v = u; v < dist.size(); ++v) upper += dist[v];
    switch (alternative) {
      case Alternative::two_sided:
        r.p = std::min(1.0, 2.0 * std::min(lower, upper));
        break;
      case Alternative::greater:
        r.p = std::min(1.0, upper);
        break;
      case Alternative::less:
        r.p = std::min(1.0, lower);
        break;
    }
  } else {
    const double n = static_cast<double>(N);
    const double var = static_cast<double>(na * nb) / 12.0 *
                       ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
      r.p = 1.0;
    } else {
      const double sd = std::sqrt(var);
      const boost::math::normal_distribution<double> normal;
      const double diff = r.u_a - mean;
      switch (alternative) {
        case Alternative::two_sided:
          r.z = std::max(0.0, std::fabs(diff) - 0.5) / sd;
          r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, r.z)));
          if (diff < 0) r.z = -r.z;
          break;
        case Alternative::greater:
          r.z = (diff - 0.5) / sd;
          r.p = boost::math::cdf(boost::math::complement(normal, r.z));
          break;
        case Alternative::less:
          r.z = (diff + 0.5) / sd;
          r.p = boost::math::cdf(normal, r.z);
          break;
      }
    }
  }

  if (r.p < alpha) {
    if (r.u_a > mean && alternative != Alternative::less) r.verdict = Verdict::better;
    if (r.u_a < mean && alternative != Alternative::greater) r.verdict = Verdict::worse;
  }
  return r;
}

}  // namespace srea::eval
