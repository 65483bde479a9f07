#include "srea/algo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srea::algo {

using core::ShapeError;
template <typename T>
using NodeT = core::detail::Node<T>;

namespace {

template <typename T>
void require_matrix(const char* op, const Tensor<T>& t, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": " + what + " must be rank 2, got " +
                     core::shape_string(t.shape()));
  }
}

void require_labels(const char* op, std::span<const int> labels, std::size_t batch,
                    std::size_t k) {
  if (labels.size() != batch) {
    throw ShapeError(std::string(op) + ": " + std::to_string(labels.size()) +
                     " labels for a batch of " + std::to_string(batch));
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw std::out_of_range(std::string(op) + ": label " + std::to_string(y) +
                              " outside [0, " + std::to_string(k) + ")");
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> reconstruction_loss(const Tensor<T>& x_hat, const Tensor<T>& x) {
  if (x_hat.shape() != x.shape()) {
    throw ShapeError("reconstruction_loss: shapes " + core::shape_string(x_hat.shape()) + " and " +
                     core::shape_string(x.shape()) + " differ");
  }
  const std::size_t n = x.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(x_hat.values()[i]) - static_cast<double>(x.values()[i]);
    acc += d * d;
  }
  const T value = static_cast<T>(acc / static_cast<double>(n));
  return core::make_result<T>(core::Shape{1}, {value}, {x_hat, x}, [n](NodeT<T>& self) {
    auto& a = *self.parents[0];
    auto& b = *self.parents[1];
    const T g = self.grad[0] * T(2) / static_cast<T>(n);
    if (a.requires_grad) {
      auto& ga = a.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) ga[i] += g * (a.value[i] - b.value[i]);
    }
    if (b.requires_grad) {
      auto& gb = b.ensure_grad();
      for (std::size_t i = 0; i < n; ++i) gb[i] -= g * (a.value[i] - b.value[i]);
    }
  });
}

template <typename T>
Tensor<T> classification_loss(const Tensor<T>& probs, std::span<const int> labels) {
  require_matrix("classification_loss", probs, "probs");
  const std::size_t B = probs.dim(0);
  const std::size_t k = probs.dim(1);
  require_labels("classification_loss", labels, B, k);
  std::vector<int> y(labels.begin(), labels.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    const double p = probs.values()[i * k + static_cast<std::size_t>(y[i])];
    acc -= std::log(std::max(p, kLogFloor));
  }
  const T value = static_cast<T>(acc / static_cast<double>(B));
  return core::make_result<T>(core::Shape{1}, {value}, {probs},
                              [B, k, y = std::move(y)](NodeT<T>& self) {
                                auto& p = *self.parents[0];
                                auto& g = p.ensure_grad();
                                const double scale =
                                    static_cast<double>(self.grad[0]) / static_cast<double>(B);
                                for (std::size_t i = 0; i < B; ++i) {
                                  const std::size_t at = i * k + static_cast<std::size_t>(y[i]);
                                  const double v = p.value[at];
                                  if (v > kLogFloor) g[at] -= static_cast<T>(scale / v);
                                }
                              });
}

template <typename T>
Tensor<T> clustering_loss(const Tensor<T>& embeddings, std::span<const int> labels,
                          const Tensor<T>& centers, ClusteringTerms* terms) {
  require_matrix("clustering_loss", embeddings, "embeddings");
  require_matrix("clustering_loss", centers, "centers");
  const std::size_t B = embeddings.dim(0);
  const std::size_t d = embeddings.dim(1);
  const std::size_t k = centers.dim(1);
  if (centers.dim(0) != d) {
    throw ShapeError("clustering_loss: centers have " + std::to_string(centers.dim(0)) +
                     " rows on axis 0, embeddings have dimension " + std::to_string(d));
  }
  if (k < 2) throw ShapeError("clustering_loss: need at least 2 centers on axis 1");
  require_labels("clustering_loss", labels, B, k);
  for (T c : centers.values()) {
    if (!std::isfinite(static_cast<double>(c))) {
      throw std::invalid_argument("clustering_loss: non-finite cluster center");
    }
  }

  const auto e = embeddings.values();
  const auto C = centers.values();
  std::vector<int> y(labels.begin(), labels.end());
  std::size_t collapsed = 0;

  // Sample-to-center distances and the softmin weights of the lse term.
  std::vector<double> dist(B * k);
  std::vector<double> soft(B * k);
  double intra = 0.0;
  double inter = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      double d2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = static_cast<double>(e[i * d + a]) - static_cast<double>(C[a * k + j]);
        d2 += diff * diff;
      }
      if (j == static_cast<std::size_t>(y[i])) intra += d2;
      double D = std::sqrt(d2);
      if (D < kDistanceFloor) {
        D = kDistanceFloor;
        ++collapsed;
      }
      dist[i * k + j] = D;
      best = std::max(best, -D);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      soft[i * k + j] = std::exp(-dist[i * k + j] - best);
      z += soft[i * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) soft[i * k + j] /= z;
    inter += best + std::log(z);
  }
  intra /= static_cast<double>(B);
  inter /= static_cast<double>(B);

  // Nearest other center for every center.
  std::vector<std::size_t> nearest(k);
  std::vector<double> gap(k);
  double reg = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = static_cast<double>(C[a * k + i]) - static_cast<double>(C[a * k + j]);
        d2 += diff * diff;
      }
      const double D = std::sqrt(d2);
      if (D < best) {
        best = D;
        nearest[i] = j;
      }
    }
    if (best < kDistanceFloor) ++collapsed;
    gap[i] = best;
    reg -= std::log(std::max(best, kDistanceFloor));
  }

  if (terms != nullptr) {
    terms->intra = intra;
    terms->inter = inter;
    terms->regularizer = reg;
    terms->collapsed = collapsed;
  }

  const T value = static_cast<T>(intra + inter + reg);
  return core::make_result<T>(
      core::Shape{1}, {value}, {embeddings, centers},
      [B, d, k, y = std::move(y), dist = std::move(dist), soft = std::move(soft),
       nearest = std::move(nearest), gap = std::move(gap)](NodeT<T>& self) {
        auto& en = *self.parents[0];
        auto& cn = *self.parents[1];
        const double g = self.grad[0];
        const double per_sample = g / static_cast<double>(B);
        std::vector<double> ge(B * d, 0.0);
        std::vector<double> gc(d * k, 0.0);
        for (std::size_t i = 0; i < B; ++i) {
          const auto yi = static_cast<std::size_t>(y[i]);
          for (std::size_t j = 0; j < k; ++j) {
            const double D = dist[i * k + j];
            // d lse / d D_ij = -soft_ij; d D / d e = (e - c) / D.
            const double w_lse = D > kDistanceFloor ? -soft[i * k + j] / D : 0.0;
            const double w = per_sample * (w_lse + (j == yi ? 2.0 : 0.0));
            if (w == 0.0) continue;
            for (std::size_t a = 0; a < d; ++a) {
              const double diff =
                  static_cast<double>(en.value[i * d + a]) - static_cast<double>(cn.value[a * k + j]);
              ge[i * d + a] += w * diff;
              gc[a * k + j] -= w * diff;
            }
          }
        }
        for (std::size_t i = 0; i < k; ++i) {
          if (gap[i] < kDistanceFloor) continue;
          const std::size_t m = nearest[i];
          const double w = -g / (gap[i] * gap[i]);
          for (std::size_t a = 0; a < d; ++a) {
            const double diff =
                static_cast<double>(cn.value[a * k + i]) - static_cast<double>(cn.value[a * k + m]);
            gc[a * k + i] += w * diff;
            gc[a * k + m] -= w * diff;
          }
        }
        if (en.requires_grad) {
          auto& out = en.ensure_grad();
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += static_cast<T>(ge[i]);
        }
        if (cn.requires_grad) {
          auto& out = cn.ensure_grad();
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += static_cast<T>(gc[i]);
        }
      });
}

template <typename T>
Tensor<T> prior_regularization_loss(const Tensor<T>& probs) {
  require_matrix("prior_regularization_loss", probs, "probs");
  const std::size_t B = probs.dim(0);
  const std::size_t k = probs.dim(1);
  if (B == 0) throw std::invalid_argument("prior_regularization_loss: empty batch");
  std::vector<double> mean(k, 0.0);
  for (std::size_t i = 0; i < B; ++i) {
    for (std::size_t j = 0; j < k; ++j) mean[j] += probs.values()[i * k + j];
  }
  const double h = 1.0 / static_cast<double>(k);
  double acc = 0.0;
  for (double& m : mean) {
    m /= static_cast<double>(B);
    acc += h * (std::log(h) - std::log(std::max(m, kLogFloor)));
  }
  return core::make_result<T>(core::Shape{1}, {static_cast<T>(acc)}, {probs},
                              [B, k, h, mean = std::move(mean)](NodeT<T>& self) {
                                auto& p = *self.parents[0];
                                auto& g = p.ensure_grad();
                                const double up = self.grad[0];
                                for (std::size_t j = 0; j < k; ++j) {
                                  if (mean[j] <= kLogFloor) continue;
                                  const double gj =
                                      -up * h / (mean[j] * static_cast<double>(B));
                                  for (std::size_t i = 0; i < B; ++i) {
                                    g[i * k + j] += static_cast<T>(gj);
                                  }
                                }
                              });
}

double total_loss(const LossParts& parts, double alpha, const LossFlags& flags) {
  const double supervised =
      parts.c + (flags.use_cc ? parts.cc : 0.0) + (flags.use_prior ? parts.rho : 0.0);
  return (flags.use_ae ? parts.ae : 0.0) + alpha * supervised;
}

#define SREA_INSTANTIATE_LOSSES(T)                                                        \
  template Tensor<T> reconstruction_loss(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> classification_loss(const Tensor<T>&, std::span<const int>);         \
  template Tensor<T> clustering_loss(const Tensor<T>&, std::span<const int>,              \
                                     const Tensor<T>&, ClusteringTerms*);                 \
  template Tensor<T> prior_regularization_loss(const Tensor<T>&);

SREA_INSTANTIATE_LOSSES(float)
SREA_INSTANTIATE_LOSSES(double)

}  // namespace srea::algo
