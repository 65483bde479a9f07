#include "srea/nn/model.hpp"

#include <cmath>
#include <string>

namespace srea::nn {

using core::Mode;
using core::Rng;
using core::Shape;

namespace {

// Kaiming-uniform with a = sqrt(5): U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
TensorF kaiming_uniform(Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<float> values(core::numel(shape));
  for (auto& v : values) v = static_cast<float>(rng.uniform(-bound, bound));
  return TensorF::from(std::move(shape), std::move(values), true);
}

TensorF zeros_param(std::size_t n) { return TensorF::zeros(Shape{n}, true); }
TensorF ones_param(std::size_t n) { return TensorF::full(Shape{n}, 1.0f, true); }

Mode bn_mode(Phase phase) { return phase == Phase::eval ? Mode::eval : Mode::train; }
Mode dropout_mode(Phase phase) { return phase == Phase::train ? Mode::train : Mode::eval; }

}  // namespace

SreaModel::SreaModel(std::size_t input_channels, std::size_t seq_len, std::size_t num_classes,
                     const Architecture& arch, Rng init_rng)
    : input_channels_(input_channels),
      seq_len_(seq_len),
      num_classes_(num_classes),
      arch_(arch) {
  if (input_channels == 0) {
    throw ArchitectureError("model needs at least one input channel");
  }
  if (num_classes < 2) {
    throw ArchitectureError("model needs at least two classes, got " +
                            std::to_string(num_classes));
  }
  if (arch.encoder_channels.empty()) {
    throw ArchitectureError("encoder needs at least one convolution block");
  }

  std::size_t length = seq_len;
  for (std::size_t i = 0; i < arch.encoder_channels.size(); ++i) {
    if (length + 2 * arch.padding < arch.kernel) {
      std::size_t min_len = 1;
      for (std::size_t j = 0; j < arch.encoder_channels.size(); ++j) min_len *= arch.stride;
      throw ArchitectureError("sequence length " + std::to_string(seq_len) +
                              " is too short for " + std::to_string(arch.encoder_channels.size()) +
                              " stride-" + std::to_string(arch.stride) +
                              " blocks; pad the series to at least " + std::to_string(min_len) +
                              " samples");
    }
    length = core::conv1d_output_length(length, arch.kernel, arch.stride, arch.padding);
    encoder_lengths_.push_back(length);
  }

  Rng rng = init_rng;
  std::size_t in_ch = input_channels;
  for (std::size_t out_ch : arch.encoder_channels) {
    ConvBlock block;
    block.weight = kaiming_uniform(Shape{out_ch, in_ch, arch.kernel}, in_ch * arch.kernel, rng);
    block.bias = zeros_param(out_ch);
    block.gamma = ones_param(out_ch);
    block.beta = zeros_param(out_ch);
    block.bn = core::BatchNormState<float>(out_ch);
    encoder_.push_back(std::move(block));
    in_ch = out_ch;
  }
  const std::size_t d = arch.embedding_dim;
  embed_weight_ = kaiming_uniform(Shape{d, in_ch, 1}, in_ch, rng);
  embed_bias_ = zeros_param(d);

  // Decoder: each transposed block restores the length the matching encoder
  // block consumed; output_padding absorbs the floor in the encoder lengths.
  const std::size_t n = arch.encoder_channels.size();
  std::vector<std::size_t> targets;
  for (std::size_t i = n - 1; i-- > 0;) targets.push_back(encoder_lengths_[i]);
  targets.push_back(seq_len);
  std::vector<std::size_t> out_channels;
  for (std::size_t i = n - 1; i-- > 0;) out_channels.push_back(arch.encoder_channels[i]);
  out_channels.push_back(input_channels);

  std::size_t cur_len = encoder_lengths_.back();
  in_ch = d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = (cur_len - 1) * arch.stride + arch.kernel - 2 * arch.padding;
    if (targets[i] < base || targets[i] - base >= arch.stride) {
      throw ArchitectureError("decoder cannot restore length " + std::to_string(targets[i]) +
                              " from " + std::to_string(cur_len));
    }
    ConvBlock block;
    const std::size_t out_ch = out_channels[i];
    block.weight = kaiming_uniform(Shape{in_ch, out_ch, arch.kernel}, out_ch * arch.kernel, rng);
    block.bias = zeros_param(out_ch);
    block.output_padding = targets[i] - base;
    block.target_len = targets[i];
    // The last block is a plain transposed convolution producing the
    // reconstruction, so it has no normalization or activation.
    if (i + 1 < n) {
      block.gamma = ones_param(out_ch);
      block.beta = zeros_param(out_ch);
      block.bn = core::BatchNormState<float>(out_ch);
    }
    decoder_.push_back(std::move(block));
    cur_len = targets[i];
    in_ch = out_ch;
  }

  hidden_.weight = kaiming_uniform(Shape{arch.classifier_hidden, d}, d, rng);
  hidden_.bias = zeros_param(arch.classifier_hidden);
  hidden_.gamma = ones_param(arch.classifier_hidden);
  hidden_.beta = zeros_param(arch.classifier_hidden);
  hidden_.bn = core::BatchNormState<float>(arch.classifier_hidden);
  class_weight_ =
      kaiming_uniform(Shape{num_classes, arch.classifier_hidden}, arch.classifier_hidden, rng);
  class_bias_ = zeros_param(num_classes);

  centers_ = TensorF::zeros(Shape{d, num_classes}, true);
}

TensorF SreaModel::block_tail(const TensorF& y, TensorF& gamma, TensorF& beta,
                              core::BatchNormState<float>& bn, Phase phase, Rng& rng) {
  bn.update_running = phase == Phase::train;
  TensorF s = core::batch_norm1d(y, gamma, beta, bn, bn_mode(phase));
  TensorF h = core::relu(s);
  return core::dropout(h, arch_.dropout, rng, dropout_mode(phase));
}

TensorF SreaModel::encode(const TensorF& x, Phase phase, Rng& dropout_rng) {
  if (x.rank() != 3 || x.dim(1) != input_channels_ || x.dim(2) != seq_len_) {
    throw core::ShapeError("SreaModel::encode: expected [B x " + std::to_string(input_channels_) +
                           " x " + std::to_string(seq_len_) + "], got " +
                           core::shape_string(x.shape()));
  }
  TensorF h = x;
  for (auto& block : encoder_) {
    TensorF y = core::conv1d(h, block.weight, block.bias, arch_.stride, arch_.padding);
    h = block_tail(y, block.gamma, block.beta, block.bn, phase, dropout_rng);
  }
  TensorF pooled = core::global_avg_pool1d(h);
  TensorF e = core::conv1d(pooled, embed_weight_, embed_bias_, 1, 0);
  return core::reshape(e, Shape{x.dim(0), arch_.embedding_dim});
}

TensorF SreaModel::decode(const TensorF& embedding, Phase phase, Rng& dropout_rng) {
  const std::size_t batch = embedding.dim(0);
  TensorF h = core::reshape(embedding, Shape{batch, arch_.embedding_dim, 1});
  h = core::upsample_nearest1d(h, encoder_lengths_.back());
  for (std::size_t i = 0; i < decoder_.size(); ++i) {
    auto& block = decoder_[i];
    TensorF y = core::conv_transpose1d(h, block.weight, block.bias, arch_.stride, arch_.padding,
                                       block.output_padding);
    if (i + 1 < decoder_.size()) {
      h = block_tail(y, block.gamma, block.beta, block.bn, phase, dropout_rng);
    } else {
      h = y;
    }
  }
  return h;
}

TensorF SreaModel::classify(const TensorF& embedding, Phase phase, Rng& dropout_rng) {
  TensorF y = core::dense(embedding, hidden_.weight, hidden_.bias);
  TensorF h = block_tail(y, hidden_.gamma, hidden_.beta, hidden_.bn, phase, dropout_rng);
  return core::dense(h, class_weight_, class_bias_);
}

SreaModel::Output SreaModel::forward(const TensorF& x, Phase phase, Rng& dropout_rng,
                                     bool with_decoder, bool with_classifier) {
  Output out;
  out.embedding = encode(x, phase, dropout_rng);
  if (with_decoder) out.reconstruction = decode(out.embedding, phase, dropout_rng);
  if (with_classifier) out.logits = classify(out.embedding, phase, dropout_rng);
  return out;
}

void SreaModel::set_centers(const std::vector<float>& column_major_dk) {
  const std::size_t d = arch_.embedding_dim;
  if (column_major_dk.size() != d * num_classes_) {
    throw core::ShapeError("set_centers: expected " + std::to_string(d * num_classes_) +
                           " values");
  }
  auto dst = centers_.mutable_values();
  for (std::size_t j = 0; j < num_classes_; ++j)
    for (std::size_t r = 0; r < d; ++r) dst[r * num_classes_ + j] = column_major_dk[j * d + r];
}

std::vector<NamedTensor> SreaModel::parameters() const {
  std::vector<NamedTensor> params;
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    const std::string p = "encoder." + std::to_string(i) + ".";
    params.push_back({p + "weight", encoder_[i].weight});
    params.push_back({p + "bias", encoder_[i].bias});
    params.push_back({p + "bn.gamma", encoder_[i].gamma});
    params.push_back({p + "bn.beta", encoder_[i].beta});
  }
  params.push_back({"embedding.weight", embed_weight_});
  params.push_back({"embedding.bias", embed_bias_});
  for (std::size_t i = 0; i < decoder_.size(); ++i) {
    const std::string p = "decoder." + std::to_string(i) + ".";
    params.push_back({p + "weight", decoder_[i].weight});
    params.push_back({p + "bias", decoder_[i].bias});
    if (i + 1 < decoder_.size()) {
      params.push_back({p + "bn.gamma", decoder_[i].gamma});
      params.push_back({p + "bn.beta", decoder_[i].beta});
    }
  }
  params.push_back({"classifier.hidden.weight", hidden_.weight});
  params.push_back({"classifier.hidden.bias", hidden_.bias});
  params.push_back({"classifier.hidden.bn.gamma", hidden_.gamma});
  params.push_back({"classifier.hidden.bn.beta", hidden_.beta});
  params.push_back({"classifier.output.weight", class_weight_});
  params.push_back({"classifier.output.bias", class_bias_});
  params.push_back({"centers", centers_});
  return params;
}

std::vector<NamedTensor> SreaModel::buffers() const {
  std::vector<NamedTensor> out;
  auto add = [&out](const std::string& prefix, const core::BatchNormState<float>& bn) {
    const std::size_t c = bn.running_mean.size();
    out.push_back({prefix + "bn.running_mean", TensorF::from(Shape{c}, bn.running_mean)});
    out.push_back({prefix + "bn.running_var", TensorF::from(Shape{c}, bn.running_var)});
  };
  for (std::size_t i = 0; i < encoder_.size(); ++i)
    add("encoder." + std::to_string(i) + ".", encoder_[i].bn);
  for (std::size_t i = 0; i + 1 < decoder_.size(); ++i)
    add("decoder." + std::to_string(i) + ".", decoder_[i].bn);
  add("classifier.hidden.", hidden_.bn);
  return out;
}

void SreaModel::load_buffers(const std::vector<NamedTensor>& values) {
  auto find = [&values](const std::string& name) -> const TensorF& {
    for (const auto& v : values)
      if (v.name == name) return v.tensor;
    throw std::invalid_argument("missing buffer '" + name + "'");
  };
  auto load = [&find](const std::string& prefix, core::BatchNormState<float>& bn) {
    const TensorF& mean = find(prefix + "bn.running_mean");
    const TensorF& var = find(prefix + "bn.running_var");
    if (mean.size() != bn.running_mean.size() || var.size() != bn.running_var.size()) {
      throw core::ShapeError("buffer '" + prefix + "' has the wrong channel count");
    }
    bn.running_mean.assign(mean.values().begin(), mean.values().end());
    bn.running_var.assign(var.values().begin(), var.values().end());
  };
  for (std::size_t i = 0; i < encoder_.size(); ++i)
    load("encoder." + std::to_string(i) + ".", encoder_[i].bn);
  for (std::size_t i = 0; i + 1 < decoder_.size(); ++i)
    load("decoder." + std::to_string(i) + ".", decoder_[i].bn);
  load("classifier.hidden.", hidden_.bn);
}

std::size_t SreaModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : parameters()) total += p.tensor.size();
  return total;
}

SreaModel build_model(std::size_t input_channels, std::size_t seq_len, std::size_t num_classes,
                      std::size_t embedding_dim, double dropout, std::uint64_t seed) {
  Architecture arch;
  arch.embedding_dim = embedding_dim;
  arch.dropout = dropout;
  return SreaModel(input_channels, seq_len, num_classes, arch,
                   Rng(seed).substream(core::Stream::init));
}

}  // namespace srea::nn
