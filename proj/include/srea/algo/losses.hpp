#pragma once

#include <cstddef>
#include <span>

#include "srea/core/tensor.hpp"

namespace srea::algo {

using core::Tensor;

inline constexpr double kLogFloor = 1e-12;
inline constexpr double kDistanceFloor = 1e-8;

/// Mean squared error over all elements.
template <typename T>
Tensor<T> reconstruction_loss(const Tensor<T>& x_hat, const Tensor<T>& x);

/// Mean negative log-likelihood of the labeled class; probs is [B x k].
template <typename T>
Tensor<T> classification_loss(const Tensor<T>& probs, std::span<const int> labels);

struct ClusteringTerms {
  double intra = 0.0;       // mean squared distance to the own-class center
  double inter = 0.0;       // mean log-sum-exp of negative distances
  double regularizer = 0.0; // -sum_i min_{j != i} log ||C_i - C_j||
  std::size_t collapsed = 0;  // distances that hit kDistanceFloor
};

/// Constrained-clustering loss on embeddings [B x d] and centers [d x k]:
///   mean_i( ||e_i - C_{y_i}||^2 + log sum_j exp(-||e_i - C_j||) ) + reg.
/// Distances below kDistanceFloor are clamped and pass no gradient.
template <typename T>
Tensor<T> clustering_loss(const Tensor<T>& embeddings, std::span<const int> labels,
                          const Tensor<T>& centers, ClusteringTerms* terms = nullptr);

/// KL(h || p_rho) with uniform prior h and p_rho the batch-mean of probs.
template <typename T>
Tensor<T> prior_regularization_loss(const Tensor<T>& probs);

struct LossFlags {
  bool use_ae = true;
  bool use_cc = true;
  bool use_prior = true;
};

struct LossParts {
  double ae = 0.0;
  double c = 0.0;
  double cc = 0.0;
  double rho = 0.0;
};

/// L = L_ae + alpha * (L_c + L_cc + L_rho) on plain numbers, honoring flags.
double total_loss(const LossParts& parts, double alpha, const LossFlags& flags);

}  // namespace srea::algo
