#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srea/core/rng.hpp"

namespace srea::algo {

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-4;  // stop once no centroid moves further than this
};

struct KMeansResult {
  std::vector<double> centroids;  // k x d, row-major
  std::vector<int> assignment;    // cluster of each point
  std::size_t iterations = 0;
  std::size_t reseeds = 0;        // empty clusters moved to the farthest point
  bool converged = false;
};

/// Lloyd's algorithm with k-means++ seeding on n points of dimension d
/// (row-major). Ties in assignment go to the lowest cluster index.
KMeansResult kmeans(std::span<const float> points, std::size_t n, std::size_t d, std::size_t k,
                    core::Rng& rng, const KMeansOptions& options = {});

/// Greedy one-to-one cluster -> class matching on the overlap counts between
/// cluster assignment and labels: repeatedly take the largest remaining
/// count (ties: lowest cluster, then lowest class). Empty clusters are never
/// matched. Entry c is the class of cluster c, or -1.
std::vector<int> match_clusters(std::span<const int> assignment, std::span<const int> labels,
                                std::size_t k);

/// Cluster-center initialization: k-means on the embeddings, clusters
/// matched to classes by overlap with the given labels. A class left without
/// a cluster gets the mean embedding of its labeled samples, or an unmatched
/// centroid when it has none. Returns k x d row-major (center j is class j).
std::vector<float> init_cluster_centers(std::span<const float> embeddings, std::size_t n,
                                        std::size_t d, std::span<const int> labels, std::size_t k,
                                        core::Rng& rng, const KMeansOptions& options = {});

}  // namespace srea::algo
