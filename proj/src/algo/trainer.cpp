#include "srea/algo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "srea/algo/kmeans.hpp"
#include "srea/algo/relabel.hpp"
#include "srea/core/ops.hpp"
#include "srea/nn/regime.hpp"

namespace srea::algo {

using core::TensorF;

TrainConfig cross_entropy_config(int epochs) {
  TrainConfig config;
  config.epochs = epochs;
  config.supervised_only = true;
  config.flags = LossFlags{false, false, false};
  return config;
}

std::string to_json(const EpochTrace& t) {
  nlohmann::ordered_json j;
  j["epoch"] = t.epoch;
  j["alpha"] = t.alpha;
  j["w"] = t.w;
  j["lr"] = t.lr;
  j["loss_total"] = t.loss_total;
  j["loss_ae"] = t.loss_ae;
  j["loss_c"] = t.loss_c;
  j["loss_cc"] = t.loss_cc;
  j["loss_rho"] = t.loss_rho;
  j["relabel_fraction"] = t.relabel_fraction;
  if (t.corrected_label_accuracy) j["corrected_label_accuracy"] = *t.corrected_label_accuracy;
  if (t.center_collapses > 0) j["center_collapses"] = t.center_collapses;
  return j.dump();
}

namespace {

std::string describe(int epoch, std::size_t batch, const LossParts& p) {
  std::ostringstream os;
  os << "non-finite loss at epoch " << epoch << ", batch " << batch << " (ae=" << p.ae
     << ", c=" << p.c << ", cc=" << p.cc << ", rho=" << p.rho << ")";
  return os.str();
}

bool finite(const LossParts& p) {
  return std::isfinite(p.ae) && std::isfinite(p.c) && std::isfinite(p.cc) && std::isfinite(p.rho);
}

TensorF gather_batch(const data::Dataset& ds, std::span<const std::size_t> indices) {
  const std::size_t s = ds.sample_size();
  std::vector<float> values(indices.size() * s);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    auto src = ds.sample(indices[b]);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(b * s));
  }
  return TensorF::from({indices.size(), ds.channels, ds.length}, std::move(values));
}

// Batches of `size` over `order`; a single leftover sample joins the last
// batch because batch normalization needs at least two.
std::vector<std::span<const std::size_t>> make_batches(std::span<const std::size_t> order,
                                                       std::size_t size) {
  std::vector<std::span<const std::size_t>> out;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t len = std::min(size, order.size() - start);
    if (order.size() - start - len == 1) ++len;
    out.push_back(order.subspan(start, len));
    start += len;
  }
  return out;
}

void check_compatible(const data::Dataset& ds, const nn::SreaModel& model) {
  ds.validate();
  if (ds.channels != model.input_channels() || ds.length != model.seq_len()) {
    throw std::invalid_argument("dataset samples are " + std::to_string(ds.channels) + "x" +
                                std::to_string(ds.length) + ", model expects " +
                                std::to_string(model.input_channels()) + "x" +
                                std::to_string(model.seq_len()));
  }
  if (ds.num_classes != model.num_classes()) {
    throw std::invalid_argument("dataset has " + std::to_string(ds.num_classes) +
                                " classes, model expects " + std::to_string(model.num_classes()));
  }
}

}  // namespace

NonFiniteLoss::NonFiniteLoss(int epoch_, std::size_t batch_, const LossParts& parts_)
    : std::runtime_error(describe(epoch_, batch_, parts_)),
      epoch(epoch_),
      batch(batch_),
      parts(parts_) {}

std::vector<float> embed(nn::SreaModel& model, const data::Dataset& dataset, nn::Phase phase,
                         std::size_t batch_size) {
  core::NoGradGuard no_grad;
  core::Rng unused(0);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> out;
  out.reserve(dataset.size() * model.embedding_dim());
  for (auto batch : make_batches(order, std::max<std::size_t>(batch_size, 2))) {
    TensorF e = model.encode(gather_batch(dataset, batch), phase, unused);
    out.insert(out.end(), e.values().begin(), e.values().end());
  }
  return out;
}

std::vector<int> predict(nn::SreaModel& model, const data::Dataset& dataset,
                         std::size_t batch_size) {
  check_compatible(dataset, model);
  core::NoGradGuard no_grad;
  core::Rng unused(0);
  const std::size_t k = model.num_classes();
  std::vector<int> out;
  out.reserve(dataset.size());
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, order.size() - start);
    auto batch = std::span<const std::size_t>(order).subspan(start, len);
    auto result = model.forward(gather_batch(dataset, batch), nn::Phase::eval, unused, false, true);
    auto logits = result.logits.values();
    for (std::size_t b = 0; b < len; ++b) {
      auto row = logits.subspan(b * k, k);
      out.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
    }
  }
  return out;
}

TrainResult train(const data::Dataset& train, nn::SreaModel& model, const TrainConfig& config,
                  core::Rng& rng, const noise::CleanLabelOracle* oracle,
                  const std::function<void(const EpochTrace&)>& on_epoch) {
  check_compatible(train, model);
  const std::size_t n = train.size();
  const std::size_t k = train.num_classes;
  const std::size_t d = model.embedding_dim();
  if (n < 2) throw std::invalid_argument("training needs at least 2 samples");
  if (oracle != nullptr && oracle->size() != n) {
    throw std::invalid_argument("label oracle size differs from the training set");
  }
  if (config.epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!config.supervised_only) config.schedule.validate(config.epochs);

  const LossFlags flags = config.supervised_only ? LossFlags{false, false, false} : config.flags;
  const std::size_t batch_size =
      std::max<std::size_t>(2, config.batch_size > 0 ? config.batch_size : nn::batch_size_for(n));

  core::Rng shuffle_rng = rng.substream(core::Stream::shuffle);
  core::Rng dropout_rng = rng.substream(core::Stream::dropout);
  core::Rng kmeans_rng = rng.substream(core::Stream::kmeans);

  std::vector<TensorF> params;
  for (const auto& p : model.parameters()) params.push_back(p.tensor);
  nn::Adam adam(params, config.adam);

  EmaBuffer ema(n, k);
  std::vector<int> corrected = train.labels;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double alpha = config.supervised_only ? 1.0 : alpha_at(epoch, config.schedule);
    const double w = config.supervised_only ? 0.0 : w_at(epoch, config.schedule);
    const double lr = nn::lr_at(epoch);

    if (flags.use_cc && epoch == config.schedule.lambda_init) {
      const std::vector<float> e = embed(model, train, nn::Phase::probe);
      model.set_centers(init_cluster_centers(e, n, d, train.labels, k, kmeans_rng));
    }

    shuffle_rng.shuffle(std::span<std::size_t>(order));
    EpochTrace trace;
    trace.epoch = epoch;
    trace.alpha = alpha;
    trace.w = w;
    trace.lr = lr;

    std::size_t batch_index = 0;
    for (auto batch : make_batches(order, batch_size)) {
      const std::size_t B = batch.size();
      auto out = model.forward(gather_batch(train, batch), nn::Phase::train, dropout_rng,
                               flags.use_ae, true);
      TensorF probs = core::softmax(out.logits);

      std::vector<int> targets(B);
      const auto p = probs.values();
      const auto e = out.embedding.values();
      const auto centers = model.centers().values();
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t i = batch[b];
        ema.push(i, p.subspan(b * k, k));
        int y = train.labels[i];
        if (w > 0.0) {
          const std::vector<double> y_c = ema.pseudo_label(i);
          std::vector<double> y_cc;
          if (flags.use_cc) y_cc = cluster_pseudo_label(e.subspan(b * d, d), centers, k);
          y = correct_label(y, y_c, y_cc, w, config.halve_pseudo_sum);
        }
        targets[b] = y;
        corrected[i] = y;
      }

      LossParts parts;
      TensorF loss;
      auto accumulate = [&loss](TensorF term) { loss = loss ? core::add(loss, term) : term; };
      if (flags.use_ae) {
        TensorF x = gather_batch(train, batch);
        TensorF l_ae = reconstruction_loss(out.reconstruction, x);
        parts.ae = l_ae.item();
        accumulate(l_ae);
      }
      if (alpha > 0.0) {
        TensorF supervised = classification_loss(probs, targets);
        parts.c = supervised.item();
        if (flags.use_cc) {
          ClusteringTerms terms;
          TensorF l_cc = clustering_loss(out.embedding, targets, model.centers(), &terms);
          parts.cc = l_cc.item();
          trace.center_collapses += terms.collapsed;
          supervised = core::add(supervised, l_cc);
        }
        if (flags.use_prior) {
          TensorF l_rho = prior_regularization_loss(probs);
          parts.rho = l_rho.item();
          supervised = core::add(supervised, l_rho);
        }
        accumulate(alpha == 1.0 ? supervised : core::scale(supervised, static_cast<float>(alpha)));
      }
      if (!finite(parts)) throw NonFiniteLoss(epoch, batch_index, parts);

      const double weight = static_cast<double>(B) / static_cast<double>(n);
      trace.loss_ae += weight * parts.ae;
      trace.loss_c += weight * parts.c;
      trace.loss_cc += weight * parts.cc;
      trace.loss_rho += weight * parts.rho;
      trace.loss_total += weight * total_loss(parts, alpha, flags);

      if (loss) {
        adam.zero_grad();
        core::backward(loss);
        adam.step(lr);
      }
      ++batch_index;
    }

    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) changed += corrected[i] != train.labels[i] ? 1 : 0;
    trace.relabel_fraction = static_cast<double>(changed) / static_cast<double>(n);
    if (oracle != nullptr) trace.corrected_label_accuracy = oracle->agreement(corrected);
    if (on_epoch) on_epoch(trace);
    result.trace.push_back(trace);
  }

  result.corrected_labels = corrected;
  if (oracle != nullptr) {
    result.corrected_label_accuracy = oracle->agreement(corrected);
    result.restored_fraction = oracle->restored_fraction(corrected);
  }
  return result;
}

}  // namespace srea::algo
