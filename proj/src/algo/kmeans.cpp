#include "srea/algo/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srea::algo {

namespace {

double squared_distance(const float* x, const double* c, std::size_t d) {
  double s = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double diff = static_cast<double>(x[a]) - c[a];
    s += diff * diff;
  }
  return s;
}

std::vector<double> seed_plus_plus(std::span<const float> points, std::size_t n, std::size_t d,
                                   std::size_t k, core::Rng& rng) {
  std::vector<double> centroids(k * d);
  auto take = [&](std::size_t c, std::size_t i) {
    for (std::size_t a = 0; a < d; ++a) centroids[c * d + a] = points[i * d + a];
  };
  take(0, rng.uniform_index(n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(&points[i * d], &centroids[(c - 1) * d], d));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        // Rounding slack: fall back to the last point with positive weight.
        for (std::size_t i = n; i-- > 0;) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      pick = rng.uniform_index(n);
    }
    take(c, pick);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(std::span<const float> points, std::size_t n, std::size_t d, std::size_t k,
                    core::Rng& rng, const KMeansOptions& options) {
  if (k == 0 || d == 0) throw std::invalid_argument("kmeans: k and d must be positive");
  if (points.size() != n * d) throw std::invalid_argument("kmeans: point buffer is not n x d");
  if (n < k) {
    throw std::invalid_argument("kmeans: " + std::to_string(n) + " points cannot form " +
                                std::to_string(k) + " clusters");
  }
  KMeansResult result;
  result.centroids = seed_plus_plus(points, n, d, k, rng);
  result.assignment.assign(n, 0);
  std::vector<double> dist(n);
  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double s = squared_distance(&points[i * d], &result.centroids[c * d], d);
        if (s < best) {
          best = s;
          arg = static_cast<int>(c);
        }
      }
      result.assignment[i] = arg;
      dist[i] = best;
    }

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(result.assignment[i]);
      ++counts[c];
      for (std::size_t a = 0; a < d; ++a) sums[c * d + a] += points[i * d + a];
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> next(d);
      if (counts[c] == 0) {
        // Move the empty cluster onto the point worst served by its centroid.
        const auto far = static_cast<std::size_t>(
            std::max_element(dist.begin(), dist.end()) - dist.begin());
        for (std::size_t a = 0; a < d; ++a) next[a] = points[far * d + a];
        dist[far] = 0.0;
        ++result.reseeds;
      } else {
        for (std::size_t a = 0; a < d; ++a) next[a] = sums[c * d + a] / static_cast<double>(counts[c]);
      }
      double moved = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = next[a] - result.centroids[c * d + a];
        moved += diff * diff;
        result.centroids[c * d + a] = next[a];
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    result.iterations = iter + 1;
    if (shift <= options.tolerance) {
      result.converged = true;
      break;
    }
  }

  // Final assignment against the final centroids.
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double s = squared_distance(&points[i * d], &result.centroids[c * d], d);
      if (s < best) {
        best = s;
        result.assignment[i] = static_cast<int>(c);
      }
    }
  }
  return result;
}

std::vector<int> match_clusters(std::span<const int> assignment, std::span<const int> labels,
                                std::size_t k) {
  if (assignment.size() != labels.size()) {
    throw std::invalid_argument("match_clusters: assignment and label counts differ");
  }
  std::vector<std::size_t> overlap(k * k, 0);
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    const auto y = static_cast<std::size_t>(labels[i]);
    if (c >= k || y >= k) throw std::out_of_range("match_clusters: index outside [0, k)");
    ++overlap[c * k + y];
    ++size[c];
  }
  std::vector<int> cluster_class(k, -1);
  std::vector<bool> class_used(k, false);
  while (true) {
    std::size_t best_c = k;
    std::size_t best_y = k;
    std::size_t best = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (cluster_class[c] != -1 || size[c] == 0) continue;
      for (std::size_t y = 0; y < k; ++y) {
        if (class_used[y]) continue;
        if (best_c == k || overlap[c * k + y] > best) {
          best = overlap[c * k + y];
          best_c = c;
          best_y = y;
        }
      }
    }
    if (best_c == k) break;
    cluster_class[best_c] = static_cast<int>(best_y);
    class_used[best_y] = true;
  }
  return cluster_class;
}

std::vector<float> init_cluster_centers(std::span<const float> embeddings, std::size_t n,
                                        std::size_t d, std::span<const int> labels, std::size_t k,
                                        core::Rng& rng, const KMeansOptions& options) {
  if (labels.size() != n) throw std::invalid_argument("init_cluster_centers: label count differs");
  const KMeansResult km = kmeans(embeddings, n, d, k, rng, options);
  const std::vector<int> cluster_class = match_clusters(km.assignment, labels, k);

  std::vector<float> centers(k * d, 0.0f);
  std::vector<bool> filled(k, false);
  std::vector<std::size_t> spare;
  for (std::size_t c = 0; c < k; ++c) {
    if (cluster_class[c] < 0) {
      spare.push_back(c);
      continue;
    }
    const auto y = static_cast<std::size_t>(cluster_class[c]);
    for (std::size_t a = 0; a < d; ++a) centers[y * d + a] = static_cast<float>(km.centroids[c * d + a]);
    filled[y] = true;
  }
  std::size_t next_spare = 0;
  for (std::size_t y = 0; y < k; ++y) {
    if (filled[y]) continue;
    std::vector<double> mean(d, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(labels[i]) != y) continue;
      ++count;
      for (std::size_t a = 0; a < d; ++a) mean[a] += embeddings[i * d + a];
    }
    if (count > 0) {
      for (std::size_t a = 0; a < d; ++a) centers[y * d + a] = static_cast<float>(mean[a] / static_cast<double>(count));
    } else if (next_spare < spare.size()) {
      const std::size_t c = spare[next_spare++];
      for (std::size_t a = 0; a < d; ++a) centers[y * d + a] = static_cast<float>(km.centroids[c * d + a]);
    }
  }
  return centers;
}

}  // namespace srea::algo
