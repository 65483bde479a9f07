#include "srea/eval/friedman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "srea/eval/mann_whitney.hpp"

namespace srea::eval {

void ScoreMatrix::validate() const {
  if (scores.size() != algorithms.size()) {
    throw std::invalid_argument("score matrix has " + std::to_string(scores.size()) +
                                " rows for " + std::to_string(algorithms.size()) + " algorithms");
  }
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (scores[a].size() != conditions.size()) {
      throw std::invalid_argument("algorithm '" + algorithms[a] + "' is missing scores");
    }
    for (double v : scores[a]) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("algorithm '" + algorithms[a] + "' has a non-finite score");
      }
    }
  }
}

std::vector<std::vector<double>> condition_ranks(const ScoreMatrix& scores) {
  scores.validate();
  const std::size_t k = scores.algorithms.size();
  const std::size_t N = scores.conditions.size();
  std::vector<std::vector<double>> ranks(k, std::vector<double>(N));
  std::vector<double> column(k);
  for (std::size_t c = 0; c < N; ++c) {
    // Negate so that the highest score receives rank 1.
    for (std::size_t a = 0; a < k; ++a) column[a] = -scores.scores[a][c];
    const auto r = midranks(column);
    for (std::size_t a = 0; a < k; ++a) ranks[a][c] = r[a];
  }
  return ranks;
}

FriedmanResult friedman_test(const ScoreMatrix& scores) {
  const std::size_t k = scores.algorithms.size();
  const std::size_t N = scores.conditions.size();
  if (k < 3) throw std::invalid_argument("friedman_test: need at least 3 algorithms");
  if (N < 2) throw std::invalid_argument("friedman_test: need at least 2 conditions");
  const auto ranks = condition_ranks(scores);

  FriedmanResult r;
  if (N < 5) {
    r.warnings.push_back("only " + std::to_string(N) +
                         " conditions; the chi-square approximation is unreliable below 5");
  }
  const double kd = static_cast<double>(k);
  const double Nd = static_cast<double>(N);
  double sum_sq = 0.0;
  for (const auto& row : ranks) {
    double s = 0.0;
    for (double v : row) s += v;
    r.mean_ranks.push_back(s / Nd);
    sum_sq += (s / Nd) * (s / Nd);
  }
  r.chi2 = 12.0 * Nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  if (std::fabs(r.chi2) < 1e-12) r.chi2 = 0.0;

  if (r.chi2 <= 0.0) {
    r.f_stat = 0.0;
    r.p_chi2 = 1.0;
    r.p_f = 1.0;
    return r;
  }
  const boost::math::chi_squared_distribution<double> chi(kd - 1.0);
  r.p_chi2 = boost::math::cdf(boost::math::complement(chi, r.chi2));
  const double denom = Nd * (kd - 1.0) - r.chi2;
  if (denom <= 0.0) {
    r.f_stat = std::numeric_limits<double>::infinity();
    r.p_f = 0.0;
  } else {
    r.f_stat = (Nd - 1.0) * r.chi2 / denom;
    const boost::math::fisher_f_distribution<double> f(kd - 1.0, (kd - 1.0) * (Nd - 1.0));
    r.p_f = boost::math::cdf(boost::math::complement(f, r.f_stat));
  }
  return r;
}

}  // namespace srea::eval
