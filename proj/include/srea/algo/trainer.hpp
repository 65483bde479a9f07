#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "srea/algo/losses.hpp"
#include "srea/algo/schedule.hpp"
#include "srea/core/rng.hpp"
#include "srea/data/dataset.hpp"
#include "srea/nn/adam.hpp"
#include "srea/nn/model.hpp"
#include "srea/noise/transition.hpp"

namespace srea::algo {

struct TrainConfig {
  int epochs = 100;
  ScheduleParams schedule;
  LossFlags flags;
  /// Plain cross-entropy baseline: alpha fixed at 1, w at 0, and only the
  /// classification loss. The loss flags are ignored.
  bool supervised_only = false;
  bool halve_pseudo_sum = false;
  nn::AdamConfig adam;
  /// 0 selects nn::batch_size_for(n).
  std::size_t batch_size = 0;
};

/// Plain cross-entropy baseline configuration.
TrainConfig cross_entropy_config(int epochs = 100);

struct EpochTrace {
  int epoch = 0;
  double alpha = 0.0;
  double w = 0.0;
  double lr = 0.0;
  double loss_total = 0.0;
  double loss_ae = 0.0;
  double loss_c = 0.0;
  double loss_cc = 0.0;
  double loss_rho = 0.0;
  double relabel_fraction = 0.0;
  std::optional<double> corrected_label_accuracy;
  std::size_t center_collapses = 0;
};

/// One JSON object on a single line.
std::string to_json(const EpochTrace& trace);

struct TrainResult {
  std::vector<EpochTrace> trace;
  std::vector<int> corrected_labels;  // final y* per training sample
  std::optional<double> corrected_label_accuracy;
  std::optional<double> restored_fraction;  // among corrupted samples
};

/// Raised when a batch loss turns NaN or infinite.
class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(int epoch, std::size_t batch, const LossParts& parts);
  int epoch;
  std::size_t batch;
  LossParts parts;
};

/// Runs the full re-labeling training loop on `train`, whose labels are the
/// given (possibly noisy) ones. The oracle, when supplied, is only used to
/// report how many corrected labels match the truth.
TrainResult train(const data::Dataset& train, nn::SreaModel& model, const TrainConfig& config,
                  core::Rng& rng, const noise::CleanLabelOracle* oracle = nullptr,
                  const std::function<void(const EpochTrace&)>& on_epoch = {});

/// Argmax of the classifier in eval mode.
std::vector<int> predict(nn::SreaModel& model, const data::Dataset& dataset,
                         std::size_t batch_size = 256);

/// Embeddings [n x d] of every sample, no gradient recorded.
std::vector<float> embed(nn::SreaModel& model, const data::Dataset& dataset, nn::Phase phase,
                         std::size_t batch_size = 256);

}  // namespace srea::algo
