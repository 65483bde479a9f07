#include "srea/algo/relabel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srea::algo {

std::vector<double> ema_weights(std::size_t m) {
  if (m == 0 || m > kEmaEpochs) {
    throw std::invalid_argument("ema_weights: need 1.." + std::to_string(kEmaEpochs) +
                                " epochs, got " + std::to_string(m));
  }
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double j = static_cast<double>(kEmaEpochs - m + 1 + r);
    w[r] = std::exp((j - static_cast<double>(kEmaEpochs)) / 2.0);
    total += w[r];
  }
  for (double& v : w) v /= total;
  return w;
}

EmaBuffer::EmaBuffer(std::size_t n, std::size_t k)
    : k_(k), slots_(n * kEmaEpochs * k, 0.0f), head_(n, 0), stored_(n, 0) {
  if (k < 2) throw std::invalid_argument("EmaBuffer: need at least 2 classes");
}

void EmaBuffer::push(std::size_t sample, std::span<const float> probs) {
  if (probs.size() != k_) throw std::invalid_argument("EmaBuffer::push: wrong class count");
  const std::size_t slot = head_.at(sample);
  std::copy(probs.begin(), probs.end(), slots_.begin() + static_cast<std::ptrdiff_t>((sample * kEmaEpochs + slot) * k_));
  head_[sample] = (slot + 1) % kEmaEpochs;
  stored_[sample] = std::min(stored_[sample] + 1, kEmaEpochs);
}

std::vector<double> EmaBuffer::pseudo_label(std::size_t sample) const {
  const std::size_t m = stored_.at(sample);
  if (m == 0) throw std::logic_error("EmaBuffer: no stored epoch for sample");
  const auto w = ema_weights(m);
  std::vector<double> out(k_, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    // r = 0 is the oldest of the m stored entries.
    const std::size_t slot = (head_[sample] + kEmaEpochs - m + r) % kEmaEpochs;
    const float* p = slots_.data() + (sample * kEmaEpochs + slot) * k_;
    for (std::size_t j = 0; j < k_; ++j) out[j] += w[r] * static_cast<double>(p[j]);
  }
  return out;
}

std::vector<double> classifier_pseudo_label(std::span<const std::vector<double>> history) {
  if (history.empty()) throw std::invalid_argument("classifier_pseudo_label: empty history");
  if (history.size() > kEmaEpochs) history = history.last(kEmaEpochs);
  const auto w = ema_weights(history.size());
  const std::size_t k = history.front().size();
  std::vector<double> out(k, 0.0);
  for (std::size_t r = 0; r < history.size(); ++r) {
    if (history[r].size() != k) throw std::invalid_argument("classifier_pseudo_label: ragged history");
    for (std::size_t j = 0; j < k; ++j) out[j] += w[r] * history[r][j];
  }
  return out;
}

std::vector<double> cluster_pseudo_label(std::span<const float> embedding,
                                         std::span<const float> centers, std::size_t k) {
  const std::size_t d = embedding.size();
  if (k == 0 || centers.size() != d * k) {
    throw std::invalid_argument("cluster_pseudo_label: centers must be [d x k]");
  }
  std::vector<double> out(k);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    double d2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double diff = static_cast<double>(embedding[a]) - static_cast<double>(centers[a * k + j]);
      d2 += diff * diff;
    }
    out[j] = -std::sqrt(d2);
    best = std::max(best, out[j]);
  }
  double z = 0.0;
  for (double& v : out) {
    v = std::exp(v - best);
    z += v;
  }
  for (double& v : out) v /= z;
  return out;
}

int correct_label(int given, std::span<const double> y_c, std::span<const double> y_cc, double w,
                  bool halve) {
  const std::size_t k = y_c.size();
  if (given < 0 || static_cast<std::size_t>(given) >= k) {
    throw std::out_of_range("correct_label: given label outside [0, k)");
  }
  if (!y_cc.empty() && y_cc.size() != k) {
    throw std::invalid_argument("correct_label: pseudo-labels differ in length");
  }
  const double pseudo_scale = (halve && !y_cc.empty()) ? 0.5 : 1.0;
  auto blended = [&](std::size_t j) {
    double pseudo = y_c[j] + (y_cc.empty() ? 0.0 : y_cc[j]);
    return (1.0 - w) * (static_cast<int>(j) == given ? 1.0 : 0.0) + w * pseudo_scale * pseudo;
  };
  auto best = static_cast<std::size_t>(given);
  double best_value = blended(best);
  for (std::size_t j = 0; j < k; ++j) {
    const double v = blended(j);
    if (v > best_value) {
      best = j;
      best_value = v;
    }
  }
  return static_cast<int>(best);
}

}  // namespace srea::algo
