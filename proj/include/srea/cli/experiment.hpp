#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srea/algo/trainer.hpp"
#include "srea/cli/config.hpp"
#include "srea/data/dataset.hpp"
#include "srea/data/normalize.hpp"
#include "srea/eval/metrics.hpp"
#include "srea/noise/transition.hpp"

namespace srea::cli {

std::string code_version();

/// Training set with the labels handed to the learner, a clean test set,
/// and the sealed truth for the training labels.
struct PreparedData {
  data::Dataset train;
  data::Dataset test;
  noise::CleanLabelOracle oracle;
  data::ChannelStats stats;
};

/// Builds or loads the data, splits it with data_seed, z-normalizes with the
/// training statistics and corrupts the training labels with the run seed.
PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed);

/// The full dataset before splitting (generated or loaded), or the
/// pre-split pair when test_path is set.
struct LoadedData {
  data::Dataset full;
  std::optional<data::Dataset> test;
};
LoadedData load_data(const ExperimentConfig& config);

struct RunResult {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string dataset;
  std::string noise_type;
  double noise_ratio = 0.0;
  double test_macro_f1 = 0.0;
  double test_accuracy = 0.0;
  std::optional<double> corrected_label_accuracy;
  std::optional<double> restored_fraction;
  std::size_t corrupted_count = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  eval::ConfusionMatrix confusion;
  std::vector<std::string> warnings;
  std::vector<algo::EpochTrace> trace;
  double wall_seconds = 0.0;
  std::string code_version;
};

/// Everything except wall-clock time, so repeated runs compare byte-equal.
std::string metrics_json(const RunResult& result);
/// One results.jsonl line (metrics plus wall-clock).
std::string result_line(const RunResult& result);
/// Parses a results.jsonl line back (traces are not stored there).
RunResult parse_result_line(const std::string& line);

struct RunOptions {
  std::optional<std::filesystem::path> checkpoint;
  std::function<void(const algo::EpochTrace&)> on_epoch;
};

RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         const RunOptions& options = {});

/// Writes metrics_seed<S>.json, trace_seed<S>.jsonl and
/// confusion_seed<S>.csv into `dir`.
void write_run_files(const std::filesystem::path& dir, const RunResult& result);

}  // namespace srea::cli
