#pragma once

#include <cstddef>
#include <vector>

#include "srea/core/rng.hpp"
#include "srea/core/tensor.hpp"

namespace srea::core {

enum class Mode { train, eval };

template <typename T>
struct BatchNormState {
  std::vector<T> running_mean;
  std::vector<T> running_var;
  double momentum = 0.1;
  double eps = 1e-5;
  bool update_running = true;

  explicit BatchNormState(std::size_t channels = 0)
      : running_mean(channels, T(0)), running_var(channels, T(1)) {}
};

// Elementwise arithmetic. Operands must have identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> square(const Tensor<T>& a);
template <typename T> Tensor<T> exp(const Tensor<T>& a);
/// Natural log of max(a, floor); the gradient is zero where the floor binds.
template <typename T> Tensor<T> log(const Tensor<T>& a, T floor = T(1e-12));
template <typename T> Tensor<T> relu(const Tensor<T>& a);

template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);

template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);

/// Softmax over the last axis of a [k] or [B x k] tensor.
template <typename T> Tensor<T> softmax(const Tensor<T>& logits);

/// Affine map y = W x + b. `input` is [n_in] or [B x n_in]; W is
/// [n_out x n_in]; b is [n_out].
template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias);

/// Cross-correlation over the length axis. `input` is [C_in x L] or
/// [B x C_in x L]; kernels are [C_out x C_in x K]; bias is [C_out].
/// Output length is floor((L + 2*padding - K) / stride) + 1.
template <typename T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& kernels, const Tensor<T>& bias,
                 std::size_t stride, std::size_t padding);

/// Adjoint of conv1d with respect to its input. Kernels are laid out
/// [C_in x C_out x K] where C_in is this op's input channel count, so the
/// same kernel tensor used by conv1d (mapping C_out -> C_in there) gives the
/// exact transpose. Output length is
/// (L - 1) * stride - 2 * padding + K + output_padding.
template <typename T>
Tensor<T> conv_transpose1d(const Tensor<T>& input, const Tensor<T>& kernels,
                           const Tensor<T>& bias, std::size_t stride, std::size_t padding,
                           std::size_t output_padding = 0);

/// Per-channel normalization over batch and length. `input` is [B x C] or
/// [B x C x L]. In train mode batch statistics are used (biased variance)
/// and, if `state.update_running`, the running estimates are refreshed
/// with the unbiased variance.
template <typename T>
Tensor<T> batch_norm1d(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta,
                       BatchNormState<T>& state, Mode mode);

/// Mean over the length axis: [C x L] -> [C x 1], [B x C x L] -> [B x C x 1].
template <typename T> Tensor<T> global_avg_pool1d(const Tensor<T>& input);

/// Nearest-neighbour upsampling along the length axis of [B x C x L].
template <typename T> Tensor<T> upsample_nearest1d(const Tensor<T>& input, std::size_t out_len);

/// Inverted dropout: in train mode zeroes entries with probability p and
/// scales survivors by 1 / (1 - p). Identity in eval mode.
template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double p, Rng& rng, Mode mode);

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride,
                                 std::size_t padding);
std::size_t conv_transpose1d_output_length(std::size_t length, std::size_t kernel,
                                           std::size_t stride, std::size_t padding,
                                           std::size_t output_padding);

}  // namespace srea::core
