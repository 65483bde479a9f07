#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "srea/core/ops.hpp"
#include "srea/core/rng.hpp"
#include "srea/core/tensor.hpp"

namespace srea::nn {

using core::TensorF;

class ArchitectureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Layer widths of the shared encoder, mirrored decoder and classifier.
/// Defaults are the published network; tests shrink the widths.
struct Architecture {
  std::vector<std::size_t> encoder_channels{128, 128, 256, 256};
  std::size_t kernel = 4;
  std::size_t stride = 2;
  std::size_t padding = 1;
  std::size_t embedding_dim = 32;
  std::size_t classifier_hidden = 128;
  double dropout = 0.2;
};

/// How a forward pass treats batch normalization and dropout.
///   train  - batch statistics, running estimates updated, dropout on
///   eval   - running statistics, dropout off
///   probe  - batch statistics, running estimates frozen, dropout off
enum class Phase { train, eval, probe };

struct NamedTensor {
  std::string name;
  TensorF tensor;
};

/// Encoder, decoder, classifier and per-class cluster centers sharing one
/// embedding space.
class SreaModel {
 public:
  struct Output {
    TensorF embedding;       // [B x d]
    TensorF reconstruction;  // [B x C x L], empty when the decoder is skipped
    TensorF logits;          // [B x k], empty when the classifier is skipped
  };

  SreaModel(std::size_t input_channels, std::size_t seq_len, std::size_t num_classes,
            const Architecture& arch, core::Rng init_rng);

  // Parameters are shared handles; a copy would alias them.
  SreaModel(const SreaModel&) = delete;
  SreaModel& operator=(const SreaModel&) = delete;
  SreaModel(SreaModel&&) = default;
  SreaModel& operator=(SreaModel&&) = default;

  std::size_t input_channels() const { return input_channels_; }
  std::size_t seq_len() const { return seq_len_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t embedding_dim() const { return arch_.embedding_dim; }
  const Architecture& architecture() const { return arch_; }

  /// `x` is [B x C x L].
  Output forward(const TensorF& x, Phase phase, core::Rng& dropout_rng, bool with_decoder = true,
                 bool with_classifier = true);

  TensorF encode(const TensorF& x, Phase phase, core::Rng& dropout_rng);
  TensorF decode(const TensorF& embedding, Phase phase, core::Rng& dropout_rng);
  TensorF classify(const TensorF& embedding, Phase phase, core::Rng& dropout_rng);

  /// Cluster centers, [d x k]; column j belongs to class j.
  TensorF& centers() { return centers_; }
  const TensorF& centers() const { return centers_; }
  void set_centers(const std::vector<float>& column_major_dk);

  /// Trainable tensors with stable, unique names (centers included).
  std::vector<NamedTensor> parameters() const;
  /// Batch-norm running statistics, as named non-trainable tensors.
  std::vector<NamedTensor> buffers() const;
  void load_buffers(const std::vector<NamedTensor>& values);

  std::size_t parameter_count() const;

 private:
  struct ConvBlock {
    TensorF weight;
    TensorF bias;
    TensorF gamma;
    TensorF beta;
    core::BatchNormState<float> bn;
    std::size_t output_padding = 0;
    std::size_t target_len = 0;
  };
  struct DenseBlock {
    TensorF weight;
    TensorF bias;
    TensorF gamma;
    TensorF beta;
    core::BatchNormState<float> bn;
  };

  TensorF block_tail(const TensorF& y, TensorF& gamma, TensorF& beta,
                     core::BatchNormState<float>& bn, Phase phase, core::Rng& rng);

  std::size_t input_channels_;
  std::size_t seq_len_;
  std::size_t num_classes_;
  Architecture arch_;
  std::vector<std::size_t> encoder_lengths_;  // length after each encoder block

  std::vector<ConvBlock> encoder_;
  TensorF embed_weight_;  // [d x C_last x 1]
  TensorF embed_bias_;
  std::vector<ConvBlock> decoder_;
  DenseBlock hidden_;
  TensorF class_weight_;
  TensorF class_bias_;
  TensorF centers_;
};

/// Builds the default network. Requires seq_len >= 16 (four stride-2
/// halvings) and num_classes >= 2.
SreaModel build_model(std::size_t input_channels, std::size_t seq_len, std::size_t num_classes,
                      std::size_t embedding_dim = 32, double dropout = 0.2,
                      std::uint64_t seed = 0);

}  // namespace srea::nn
