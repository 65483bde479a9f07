#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srea/algo/trainer.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/nn/model.hpp"
#include "srea/noise/transition.hpp"

namespace srea::cli {

/// Invalid configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // Data. `dataset` is one of cbf, chp (generated), tsv, cache (files).
  std::string dataset = "cbf";
  std::string train_path;  // tsv: comma-separated channel files; cache: one file
  std::string test_path;   // optional; when empty the data is split
  std::size_t n = 930;
  std::size_t length = 128;
  std::size_t days = 60;
  data::Season season = data::Season::heating;
  double split_ratio = 0.8;
  std::uint64_t data_seed = 0;

  // Label noise on the training part.
  noise::NoiseKind noise_type = noise::NoiseKind::symmetric;
  double noise_ratio = 0.0;

  // Training.
  std::string algorithm = "srea";  // srea | ce
  int epochs = 100;
  algo::ScheduleParams schedule;
  algo::LossFlags flags;
  bool halve_pseudo_sum = false;
  bool coupled_weight_decay = false;
  nn::Architecture architecture;

  // Bookkeeping; not part of the config hash.
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "results";
  bool save_checkpoints = false;
  std::string name;

  /// Throws ConfigError.
  void validate() const;
  algo::TrainConfig train_config() const;
};

/// Sets one key from its text form; unknown keys and malformed values throw
/// ConfigError. Keys match the field names (schedule and flag fields use
/// lambda_init, delta_start, delta_end, use_ae, use_cc, use_prior; the
/// architecture uses encoder_channels, embedding_dim, classifier_hidden,
/// dropout).
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat "key = value" file in TOML syntax: '#' comments, quoted strings,
/// true/false, numbers and [a, b] arrays.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Canonical TOML of every semantic field, in fixed order.
std::string canonical_config(const ExperimentConfig& config);
/// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace srea::cli
