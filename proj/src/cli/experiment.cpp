#include "srea/cli/experiment.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srea/core/record_io.hpp"
#include "srea/data/split.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/data/tsv.hpp"
#include "srea/data/windowing.hpp"
#include "srea/nn/checkpoint.hpp"

#ifndef SREA_VERSION
#define SREA_VERSION "0.0.0"
#endif

namespace srea::cli {

using json = nlohmann::ordered_json;

std::string code_version() { return SREA_VERSION; }

namespace {

std::vector<std::filesystem::path> path_list(const std::string& text) {
  std::vector<std::filesystem::path> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (!piece.empty()) out.emplace_back(piece);
  }
  return out;
}

void require_files(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) {
    if (!std::filesystem::exists(p)) throw ConfigError("data file '" + p.string() + "' does not exist");
  }
}

}  // namespace

LoadedData load_data(const ExperimentConfig& config) {
  LoadedData out;
  core::Rng data_rng = core::Rng(config.data_seed).substream(core::Stream::data);
  if (config.dataset == "cbf") {
    out.full = data::generate_cbf(config.n, config.length, data_rng);
  } else if (config.dataset == "chp") {
    data::ChpConfig chp;
    chp.days = config.days;
    chp.season = config.season;
    const data::Series series = data::generate_chp_like(chp, data_rng);
    data::WindowingConfig wcfg;
    wcfg.p_max = chp.p_max;
    out.full = data::windowize(series, wcfg);
  } else if (config.dataset == "tsv") {
    const auto train_files = path_list(config.train_path);
    require_files(train_files);
    out.full = data::load_tsv(train_files);
    if (!config.test_path.empty()) {
      const auto test_files = path_list(config.test_path);
      require_files(test_files);
      out.test = data::load_tsv(test_files, out.full.class_names);
    }
  } else {
    require_files({config.train_path});
    out.full = data::load_dataset(config.train_path);
    if (!config.test_path.empty()) {
      require_files({config.test_path});
      out.test = data::load_dataset(config.test_path);
    }
  }
  return out;
}

PreparedData prepare_data(const ExperimentConfig& config, std::uint64_t seed) {
  LoadedData loaded = load_data(config);
  PreparedData out;
  if (loaded.test) {
    out.train = std::move(loaded.full);
    out.test = std::move(*loaded.test);
  } else {
    core::Rng split_rng = core::Rng(config.data_seed).substream(core::Stream::split);
    auto parts = data::split(loaded.full, config.split_ratio, split_rng);
    out.train = std::move(parts.train);
    out.test = std::move(parts.test);
  }
  out.stats = data::znormalize(out.train, out.test);

  if (config.noise_ratio > 0.0) {
    core::Rng noise_rng = core::Rng(seed).substream(core::Stream::noise);
    const auto T = noise::build_transition(config.noise_type, out.train.num_classes, config.noise_ratio);
    auto corruption = noise::corrupt(out.train.labels, T, noise_rng);
    out.train.labels = std::move(corruption.labels);
    out.oracle = std::move(corruption.oracle);
  } else {
    out.oracle = noise::make_oracle(out.train.labels, out.train.labels);
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config, std::uint64_t seed,
                         const RunOptions& options) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  PreparedData prepared = prepare_data(config, seed);

  RunResult result;
  result.config_hash = config_hash(config);
  result.seed = seed;
  result.algorithm = config.algorithm;
  result.dataset = prepared.train.name;
  result.noise_type = std::string(noise::to_string(config.noise_type));
  result.noise_ratio = config.noise_ratio;
  result.corrupted_count = prepared.oracle.corrupted_count();
  result.train_size = prepared.train.size();
  result.test_size = prepared.test.size();
  for (int j : prepared.train.missing_classes()) {
    result.warnings.push_back("class " + std::to_string(j) + " has no training sample");
  }

  core::Rng rng(seed);
  nn::SreaModel model(prepared.train.channels, prepared.train.length, prepared.train.num_classes,
                      config.architecture, rng.substream(core::Stream::init));
  const algo::TrainResult trained =
      algo::train(prepared.train, model, config.train_config(), rng, &prepared.oracle,
                  options.on_epoch);

  const std::vector<int> pred = algo::predict(model, prepared.test);
  const auto report = eval::f1_report(pred, prepared.test.labels, prepared.test.num_classes);
  result.test_macro_f1 = report.macro;
  result.test_accuracy = eval::accuracy(pred, prepared.test.labels);
  result.confusion = eval::confusion_matrix(pred, prepared.test.labels, prepared.test.num_classes);
  result.warnings.insert(result.warnings.end(), report.warnings.begin(), report.warnings.end());
  result.corrected_label_accuracy = trained.corrected_label_accuracy;
  result.restored_fraction = trained.restored_fraction;
  result.trace = trained.trace;

  if (options.checkpoint) {
    std::vector<core::Record> extra;
    std::vector<float> mean(prepared.stats.mean.begin(), prepared.stats.mean.end());
    std::vector<float> stddev(prepared.stats.stddev.begin(), prepared.stats.stddev.end());
    extra.push_back({"norm.mean", core::Shape{mean.size()}, mean});
    extra.push_back({"norm.std", core::Shape{stddev.size()}, stddev});
    nn::save_checkpoint(*options.checkpoint, model, extra);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.code_version = code_version();
  return result;
}

namespace {

json metrics_object(const RunResult& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["algorithm"] = r.algorithm;
  j["dataset"] = r.dataset;
  j["noise_type"] = r.noise_type;
  j["noise_ratio"] = r.noise_ratio;
  j["test_macro_f1"] = r.test_macro_f1;
  j["test_accuracy"] = r.test_accuracy;
  j["corrected_label_accuracy"] =
      r.corrected_label_accuracy ? json(*r.corrected_label_accuracy) : json(nullptr);
  j["restored_fraction"] = r.restored_fraction ? json(*r.restored_fraction) : json(nullptr);
  j["corrupted_count"] = r.corrupted_count;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  json cm = json::array();
  for (std::size_t t = 0; t < r.confusion.k; ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < r.confusion.k; ++p) row.push_back(r.confusion.at(t, p));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  j["warnings"] = r.warnings;
  j["code_version"] = r.code_version;
  return j;
}

}  // namespace

std::string metrics_json(const RunResult& result) {
  json j = metrics_object(result);
  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    j["final_epoch"] = json::parse(algo::to_json(last));
  }
  return j.dump(2) + "\n";
}

std::string result_line(const RunResult& result) {
  json j = metrics_object(result);
  j["wall_seconds"] = result.wall_seconds;
  return j.dump();
}

RunResult parse_result_line(const std::string& line) {
  const json j = json::parse(line);
  RunResult r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.algorithm = j.at("algorithm").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.noise_type = j.at("noise_type").get<std::string>();
  r.noise_ratio = j.at("noise_ratio").get<double>();
  r.test_macro_f1 = j.at("test_macro_f1").get<double>();
  r.test_accuracy = j.value("test_accuracy", 0.0);
  if (j.contains("corrected_label_accuracy") && !j["corrected_label_accuracy"].is_null()) {
    r.corrected_label_accuracy = j["corrected_label_accuracy"].get<double>();
  }
  if (j.contains("restored_fraction") && !j["restored_fraction"].is_null()) {
    r.restored_fraction = j["restored_fraction"].get<double>();
  }
  r.corrupted_count = j.value("corrupted_count", std::size_t{0});
  r.train_size = j.value("train_size", std::size_t{0});
  r.test_size = j.value("test_size", std::size_t{0});
  if (j.contains("confusion")) {
    const auto& cm = j["confusion"];
    r.confusion.k = cm.size();
    for (const auto& row : cm) {
      for (const auto& v : row) r.confusion.counts.push_back(v.get<std::size_t>());
    }
  }
  r.wall_seconds = j.value("wall_seconds", 0.0);
  r.code_version = j.value("code_version", std::string());
  return r;
}

void write_run_files(const std::filesystem::path& dir, const RunResult& result) {
  std::filesystem::create_directories(dir);
  const std::string suffix = "_seed" + std::to_string(result.seed);
  {
    std::ofstream out(dir / ("metrics" + suffix + ".json"));
    out << metrics_json(result);
  }
  {
    std::ofstream out(dir / ("trace" + suffix + ".jsonl"));
    for (const auto& t : result.trace) out << algo::to_json(t) << '\n';
  }
  {
    std::ofstream out(dir / ("confusion" + suffix + ".csv"));
    out << result.confusion.to_csv();
  }
}

}  // namespace srea::cli
