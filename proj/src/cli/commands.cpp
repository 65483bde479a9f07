#include "srea/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "srea/algo/trainer.hpp"
#include "srea/cli/bench.hpp"
#include "srea/cli/config.hpp"
#include "srea/cli/experiment.hpp"
#include "srea/core/record_io.hpp"
#include "srea/data/normalize.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/data/tsv.hpp"
#include "srea/data/windowing.hpp"
#include "srea/eval/critical_difference.hpp"
#include "srea/eval/friedman.hpp"
#include "srea/eval/mann_whitney.hpp"
#include "srea/eval/metrics.hpp"
#include "srea/nn/checkpoint.hpp"

namespace srea::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

/// A missing input file; exit code 2 like other usage errors.
class MissingFile : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) throw MissingFile("file '" + p.string() + "' does not exist");
}

bool has_extension(const fs::path& p, const char* ext) { return p.extension() == ext; }

std::vector<fs::path> path_list(const std::string& text) {
  std::vector<fs::path> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (!piece.empty()) out.emplace_back(piece);
  }
  return out;
}

// Datasets on disk: a record-format cache, or tsv file(s), one per channel.
data::Dataset read_dataset(const std::string& spec) {
  const auto paths = path_list(spec);
  if (paths.empty()) throw ConfigError("no dataset path given");
  for (const auto& p : paths) require_exists(p);
  if (paths.size() == 1 && !has_extension(paths[0], ".tsv") && !has_extension(paths[0], ".txt")) {
    return data::load_dataset(paths[0]);
  }
  return data::load_tsv(paths);
}

void write_dataset(const std::string& spec, const data::Dataset& ds) {
  const auto paths = path_list(spec);
  if (paths.empty()) throw ConfigError("no output path given");
  for (const auto& p : paths) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  }
  if (paths.size() == 1 && !has_extension(paths[0], ".tsv") && !has_extension(paths[0], ".txt")) {
    data::save_dataset(paths[0], ds);
  } else {
    data::write_tsv(paths, ds);
  }
}

// Options that mirror config keys. Values are recorded as text and applied
// after the config file, so flags win.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
  }
  void add_switch(CLI::App* app, const std::string& flag, const std::string& key,
                  const std::string& value, const std::string& help) {
    app->add_flag_callback(flag, [this, key, value]() { values.emplace_back(key, value); }, help);
  }
  void apply(ExperimentConfig& config) const {
    for (const auto& [k, v] : values) set_config_value(config, k, v);
  }
};

void add_experiment_options(CLI::App* app, Overrides& o) {
  o.add(app, "--dataset", "dataset", "cbf, chp, tsv or cache");
  o.add(app, "--train-path", "train_path", "training data (tsv: comma-separated channel files)");
  o.add(app, "--test-path", "test_path", "test data; when absent the data is split");
  o.add(app, "--n", "n", "number of generated CBF series");
  o.add(app, "--length", "length", "length of generated CBF series");
  o.add(app, "--days", "days", "simulated days of CHP data");
  o.add(app, "--season", "season", "heating or summer");
  o.add(app, "--split-ratio", "split_ratio", "training fraction of the split");
  o.add(app, "--data-seed", "data_seed", "seed of data generation and splitting");
  o.add(app, "--noise-type", "noise_type", "symmetric, asymmetric or flip");
  o.add(app, "--noise-ratio", "noise_ratio", "label noise ratio in [0, 1)");
  o.add(app, "--algorithm", "algorithm", "srea or ce");
  o.add(app, "--epochs", "epochs", "training epochs");
  o.add(app, "--lambda-init", "lambda_init", "epoch where supervision and clustering start");
  o.add(app, "--delta-start", "delta_start", "length of the alpha ramp");
  o.add(app, "--delta-end", "delta_end", "length of the w ramp");
  o.add_switch(app, "--no-ae", "use_ae", "false", "drop the reconstruction loss");
  o.add_switch(app, "--no-cc", "use_cc", "false", "drop the clustering loss and cluster pseudo-labels");
  o.add_switch(app, "--no-prior", "use_prior", "false", "drop the prior regularization");
  o.add_switch(app, "--halve-pseudo-sum", "halve_pseudo_sum", "true",
               "average instead of add the two pseudo-labels");
  o.add_switch(app, "--coupled-weight-decay", "coupled_weight_decay", "true",
               "add weight decay to the gradient instead of the parameters");
  o.add(app, "--encoder-channels", "encoder_channels", "comma-separated encoder widths");
  o.add(app, "--embedding-dim", "embedding_dim", "embedding dimension");
  o.add(app, "--classifier-hidden", "classifier_hidden", "classifier hidden units");
  o.add(app, "--dropout", "dropout", "dropout probability");
  o.add(app, "--seeds", "seeds", "seed list, e.g. 0,1,2 or 0..9");
  o.add(app, "--output,-o", "output_dir", "output directory");
  o.add_switch(app, "--save-checkpoints", "save_checkpoints", "true", "write a checkpoint per seed");
  o.add(app, "--name", "name", "label used by compare");
}

ExperimentConfig resolve_config(const std::string& config_path, const Overrides& overrides) {
  ExperimentConfig config;
  if (!config_path.empty()) {
    require_exists(config_path);
    config = load_config(config_path);
  }
  overrides.apply(config);
  config.validate();
  return config;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config) {
  json j;
  j["name"] = config.name;
  j["config_hash"] = config_hash(config);
  j["code_version"] = code_version();
  j["seeds"] = config.seeds;
  j["config"] = canonical_config(config);
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const std::string& generator, std::size_t n, std::size_t length, std::size_t days,
                 const std::string& season, std::uint64_t seed, const std::string& out_spec,
                 std::ostream& out) {
  core::Rng rng = core::Rng(seed).substream(core::Stream::data);
  if (generator == "cbf") {
    const auto ds = data::generate_cbf(n, length, rng);
    write_dataset(out_spec, ds);
    out << "wrote " << ds.size() << " CBF series of length " << ds.length << " to " << out_spec << '\n';
    return kExitOk;
  }
  if (generator != "chp") throw ConfigError("unknown generator '" + generator + "' (cbf or chp)");
  data::ChpConfig cfg;
  cfg.days = days;
  if (season == "summer") {
    cfg.season = data::Season::summer;
  } else if (season != "heating") {
    throw ConfigError("season must be heating or summer");
  }
  const auto series = data::generate_chp_like(cfg, rng);
  const fs::path path(out_spec);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (has_extension(path, ".csv")) {
    data::write_series_csv(path, series);
    out << "wrote " << series.size() << " one-minute rows to " << out_spec << '\n';
  } else {
    data::WindowingConfig wcfg;
    wcfg.p_max = cfg.p_max;
    const auto ds = data::windowize(series, wcfg);
    write_dataset(out_spec, ds);
    out << "wrote " << ds.size() << " windows of " << ds.channels << "x" << ds.length << " to "
        << out_spec << '\n';
  }
  return kExitOk;
}

int cmd_windowize(const std::string& input, const std::string& out_spec, std::size_t window,
                  std::size_t stride, std::size_t factor, std::size_t levels, double p_max,
                  std::ostream& out) {
  require_exists(input);
  const auto series = data::read_series_csv(input);
  data::WindowingConfig cfg;
  cfg.window_len = window;
  cfg.stride = stride;
  cfg.resample_factor = factor;
  cfg.levels = levels;
  cfg.p_max = p_max;
  const auto ds = data::windowize(series, cfg);
  write_dataset(out_spec, ds);
  out << "wrote " << ds.size() << " windows to " << out_spec << '\n';
  return kExitOk;
}

int cmd_corrupt(const std::string& input, const std::string& out_spec, std::string oracle_path,
                const std::string& type, double ratio, std::uint64_t seed, std::ostream& out) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("noise ratio must lie in [0, 1]");
  noise::NoiseKind kind{};
  try {
    kind = noise::parse_noise_kind(type);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  data::Dataset ds = read_dataset(input);
  core::Rng rng = core::Rng(seed).substream(core::Stream::noise);
  const auto T = noise::build_transition(kind, ds.num_classes, ratio);
  auto corruption = noise::corrupt(ds.labels, T, rng);
  ds.labels = corruption.labels;
  write_dataset(out_spec, ds);
  if (oracle_path.empty()) oracle_path = path_list(out_spec).front().string() + ".oracle";
  corruption.oracle.save(oracle_path);
  out << "corrupted " << corruption.oracle.corrupted_count() << " of " << ds.size() << " labels ("
      << type << ", " << ratio << "); oracle in " << oracle_path << '\n';
  return kExitOk;
}

void check_inputs(const ExperimentConfig& config) {
  if (config.dataset != "tsv" && config.dataset != "cache") return;
  for (const auto& spec : {config.train_path, config.test_path}) {
    for (const auto& p : path_list(spec)) require_exists(p);
  }
}

int cmd_train(const ExperimentConfig& config, bool quiet, std::ostream& out) {
  check_inputs(config);
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_manifest(dir, config);
  for (auto seed : config.seeds) {
    RunOptions options;
    if (config.save_checkpoints) options.checkpoint = dir / ("checkpoint_seed" + std::to_string(seed) + ".bin");
    if (!quiet) {
      options.on_epoch = [&out, seed](const algo::EpochTrace& t) {
        out << "seed " << seed << " " << algo::to_json(t) << '\n';
      };
    }
    const RunResult result = run_experiment(config, seed, options);
    write_run_files(dir, result);
    {
      std::ofstream lines(dir / "results.jsonl", std::ios::app);
      lines << result_line(result) << '\n';
    }
    out << "seed " << seed << ": test macro-F1 " << result.test_macro_f1;
    if (result.corrected_label_accuracy) {
      out << ", corrected-label accuracy " << *result.corrected_label_accuracy;
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& data_spec, bool raw,
             const std::string& out_path, std::ostream& out) {
  require_exists(checkpoint);
  auto loaded = nn::load_checkpoint(checkpoint);
  data::Dataset ds = read_dataset(data_spec);
  if (!raw) {
    const auto* mean = core::try_find_record(loaded.records, "norm.mean");
    const auto* stddev = core::try_find_record(loaded.records, "norm.std");
    if (mean != nullptr && stddev != nullptr) {
      data::ChannelStats stats;
      stats.mean.assign(mean->values.begin(), mean->values.end());
      stats.stddev.assign(stddev->values.begin(), stddev->values.end());
      data::apply_channel_stats(ds, stats);
    }
  }
  const auto pred = algo::predict(loaded.model, ds);
  const auto report = eval::f1_report(pred, ds.labels, ds.num_classes);
  const auto cm = eval::confusion_matrix(pred, ds.labels, ds.num_classes);
  json j;
  j["samples"] = ds.size();
  j["macro_f1"] = report.macro;
  j["per_class_f1"] = report.per_class;
  j["accuracy"] = eval::accuracy(pred, ds.labels);
  json counts = json::array();
  for (std::size_t t = 0; t < cm.k; ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < cm.k; ++p) row.push_back(cm.at(t, p));
    counts.push_back(row);
  }
  j["confusion"] = counts;
  j["confusion_percent"] = cm.row_percentages();
  j["warnings"] = report.warnings;
  const std::string text = j.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream(out_path) << text;
    std::ofstream(fs::path(out_path).replace_extension(".csv")) << cm.to_csv();
  }
  out << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ResultSet {
  std::string name;
  // condition -> per-seed macro-F1
  std::map<std::string, std::vector<double>> scores;
};

ResultSet read_result_set(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw MissingFile("result directory '" + dir.string() + "' does not exist");
  ResultSet set;
  set.name = dir.filename().string();
  if (set.name.empty()) set.name = dir.parent_path().filename().string();
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    const json j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("name") && j["name"].is_string() &&
        !j["name"].get<std::string>().empty()) {
      set.name = j["name"].get<std::string>();
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "results.jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw MissingFile("no results.jsonl under '" + dir.string() + "'");
  for (const auto& file : files) {
    std::ifstream in(file);
    std::string line;
    std::map<std::string, std::map<std::uint64_t, double>> by_seed;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const RunResult r = parse_result_line(line);
      std::ostringstream key;
      key << r.dataset << "/" << r.noise_type << "/" << r.noise_ratio;
      by_seed[key.str()][r.seed] = r.test_macro_f1;  // a rerun of a seed replaces it
    }
    for (auto& [key, seeds] : by_seed) {
      for (auto& [seed, f1] : seeds) set.scores[key].push_back(f1);
    }
  }
  return set;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out_dir, double alpha,
                bool one_sided, std::ostream& out) {
  if (dirs.size() < 2) throw ConfigError("compare needs at least two result directories");
  std::vector<ResultSet> sets;
  std::map<std::string, int> seen;
  for (const auto& d : dirs) {
    ResultSet s = read_result_set(d);
    const int count = seen[s.name]++;
    if (count > 0) s.name += "#" + std::to_string(count + 1);
    sets.push_back(std::move(s));
  }

  // Conditions covered by every result set.
  std::vector<std::string> conditions;
  for (const auto& [key, v] : sets.front().scores) {
    bool everywhere = true;
    for (const auto& s : sets) everywhere = everywhere && s.scores.count(key) > 0;
    if (everywhere) conditions.push_back(key);
  }
  if (conditions.empty()) throw ConfigError("the result sets share no condition");

  const auto alternative = one_sided ? eval::Alternative::greater : eval::Alternative::two_sided;
  json report;
  report["reference"] = sets.front().name;
  report["alpha"] = alpha;
  report["alternative"] = one_sided ? "greater" : "two-sided";
  std::ostringstream table;
  table << std::fixed << std::setprecision(3);
  table << "| condition |";
  for (const auto& s : sets) table << ' ' << s.name << " |";
  table << "\n|---|";
  for (std::size_t i = 0; i < sets.size(); ++i) table << "---|";
  table << '\n';

  json cells = json::array();
  for (const auto& cond : conditions) {
    table << "| " << cond << " |";
    const auto& ref = sets.front().scores.at(cond);
    for (std::size_t a = 0; a < sets.size(); ++a) {
      const auto& mine = sets[a].scores.at(cond);
      json cell;
      cell["condition"] = cond;
      cell["algorithm"] = sets[a].name;
      cell["mean"] = mean_of(mine);
      cell["std"] = std_of(mine);
      cell["runs"] = mine.size();
      std::string mark;
      if (a > 0) {
        if (mine.size() >= 3 && ref.size() >= 3) {
          // Verdict of this algorithm against the reference.
          const auto r = eval::mann_whitney_u(mine, ref, alpha, alternative);
          mark = std::string(eval::to_string(r.verdict));
          cell["p"] = r.p;
          cell["verdict"] = mark;
        } else {
          mark = "n/a";
          cell["verdict"] = nullptr;
        }
      }
      table << ' ' << mean_of(mine) << " ± " << std_of(mine) << (mark.empty() ? "" : " (" + mark + ")")
            << " |";
      cells.push_back(cell);
    }
    table << '\n';
  }
  report["cells"] = cells;

  eval::ScoreMatrix matrix;
  for (const auto& s : sets) {
    matrix.algorithms.push_back(s.name);
    std::vector<double> row;
    for (const auto& cond : conditions) row.push_back(mean_of(s.scores.at(cond)));
    matrix.scores.push_back(row);
  }
  matrix.conditions = conditions;

  fs::create_directories(out_dir);
  if (sets.size() >= 3 && conditions.size() >= 2) {
    const auto fr = eval::friedman_test(matrix);
    const double cd_alpha = std::fabs(alpha - 0.1) < 1e-12 ? 0.1 : 0.05;
    const double cd = eval::nemenyi_cd(sets.size(), conditions.size(), cd_alpha);
    const auto layout = eval::cd_diagram_layout(matrix.algorithms, fr.mean_ranks, cd);
    json f;
    f["chi2"] = fr.chi2;
    f["f_stat"] = std::isfinite(fr.f_stat) ? json(fr.f_stat) : json("inf");
    f["p_chi2"] = fr.p_chi2;
    f["p_f"] = fr.p_f;
    f["mean_ranks"] = fr.mean_ranks;
    f["critical_difference"] = cd;
    f["warnings"] = fr.warnings;
    report["friedman"] = f;
    std::ofstream(fs::path(out_dir) / "cd_diagram.json") << layout.to_json() << '\n';
    std::ofstream(fs::path(out_dir) / "cd_diagram.svg") << layout.to_svg();
    table << "\nFriedman chi2 = " << fr.chi2 << " (p = " << fr.p_chi2 << "), Nemenyi CD = " << cd
          << '\n';
  } else {
    report["friedman"] = nullptr;
    table << "\nFriedman/Nemenyi skipped: need at least 3 result sets and 2 conditions.\n";
  }
  std::ofstream(fs::path(out_dir) / "comparison.json") << report.dump(2) << '\n';
  std::ofstream(fs::path(out_dir) / "comparison.md") << table.str();
  out << table.str();
  return kExitOk;
}

int cmd_bench(const ExperimentConfig& config, const std::string& types, const std::string& ratios,
              std::size_t threads, std::ostream& out) {
  BenchGrid grid;
  for (const auto& t : path_list(types)) {
    try {
      grid.types.push_back(noise::parse_noise_kind(t.string()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& r : path_list(ratios)) {
    ExperimentConfig probe;
    set_config_value(probe, "noise_ratio", r.string());
    grid.ratios.push_back(probe.noise_ratio);
  }
  grid.seeds = config.seeds;
  if (grid.types.empty() || grid.ratios.empty()) throw ConfigError("bench needs noise types and ratios");
  check_inputs(config);
  const auto jobs = expand_grid(config, grid);
  for (const auto& job : jobs) job.config.validate();
  const std::size_t workers = worker_count(threads, jobs.size());
  out << "bench: " << jobs.size() << " runs on " << workers << " worker(s)\n";
  const auto summary = run_bench(jobs, workers, out);
  out << "bench: " << summary.completed << " completed, " << summary.skipped << " skipped, "
      << summary.failed << " failed\n";
  return summary.failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SREA: self-re-labeling time series classification under label noise", "srea"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  std::string generator = "cbf";
  std::size_t gen_n = 930;
  std::size_t gen_length = 128;
  std::size_t gen_days = 60;
  std::string gen_season = "heating";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--generator", generator, "cbf or chp")->capture_default_str();
  gen->add_option("--n", gen_n, "CBF series")->capture_default_str();
  gen->add_option("--length", gen_length, "CBF length")->capture_default_str();
  gen->add_option("--days", gen_days, "CHP days")->capture_default_str();
  gen->add_option("--season", gen_season, "heating or summer")->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--out,-o", gen_out,
                  "output: .tsv text, .csv raw CHP series, anything else a binary dataset cache")
      ->required();

  // windowize
  auto* win = app.add_subcommand("windowize", "cut a raw CHP-style CSV series into labeled windows");
  std::string win_in;
  std::string win_out;
  data::WindowingConfig wdef;
  std::size_t win_len = wdef.window_len;
  std::size_t win_stride = wdef.stride;
  std::size_t win_factor = wdef.resample_factor;
  std::size_t win_levels = wdef.levels;
  double win_pmax = wdef.p_max;
  win->add_option("--input,-i", win_in, "CSV series")->required();
  win->add_option("--out,-o", win_out, "output dataset")->required();
  win->add_option("--window", win_len, "window length after resampling")->capture_default_str();
  win->add_option("--stride", win_stride, "window stride")->capture_default_str();
  win->add_option("--resample", win_factor, "block-mean factor")->capture_default_str();
  win->add_option("--levels", win_levels, "power levels")->capture_default_str();
  win->add_option("--p-max", win_pmax, "rated power")->capture_default_str();

  // corrupt
  auto* cor = app.add_subcommand("corrupt", "inject label noise and seal the clean labels");
  std::string cor_in;
  std::string cor_out;
  std::string cor_oracle;
  std::string cor_type = "symmetric";
  double cor_ratio = 0.0;
  std::uint64_t cor_seed = 0;
  cor->add_option("--input,-i", cor_in, "dataset cache or tsv file(s)")->required();
  cor->add_option("--out,-o", cor_out, "output dataset")->required();
  cor->add_option("--oracle", cor_oracle, "sealed clean-label file (default <out>.oracle)");
  cor->add_option("--noise-type", cor_type, "symmetric, asymmetric or flip")->capture_default_str();
  cor->add_option("--noise-ratio", cor_ratio, "noise ratio")->capture_default_str();
  cor->add_option("--seed", cor_seed, "noise seed")->capture_default_str();

  // train
  auto* trn = app.add_subcommand("train", "train one run per seed");
  std::string trn_config;
  bool trn_quiet = false;
  Overrides trn_over;
  trn->add_option("--config,-c", trn_config, "TOML-style config file");
  trn->add_flag("--quiet,-q", trn_quiet, "no per-epoch trace on stdout");
  add_experiment_options(trn, trn_over);

  // eval
  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint on labeled data");
  std::string evl_ckpt;
  std::string evl_data;
  std::string evl_out;
  bool evl_raw = false;
  evl->add_option("--checkpoint", evl_ckpt, "model checkpoint")->required();
  evl->add_option("--data", evl_data, "dataset cache or tsv file(s)")->required();
  evl->add_option("--out,-o", evl_out, "metrics JSON path (a CSV confusion matrix goes beside it)");
  evl->add_flag("--raw", evl_raw, "data is already normalized");

  // compare
  auto* cmp = app.add_subcommand("compare", "significance tests across result directories");
  std::vector<std::string> cmp_dirs;
  std::string cmp_out = "comparison";
  double cmp_alpha = 0.05;
  bool cmp_one_sided = false;
  cmp->add_option("dirs", cmp_dirs, "result directories; the first is the reference")->required();
  cmp->add_option("--out,-o", cmp_out, "report directory")->capture_default_str();
  cmp->add_option("--alpha", cmp_alpha, "significance level")->capture_default_str();
  cmp->add_flag("--one-sided", cmp_one_sided, "test whether each set beats the reference");

  // bench
  auto* bch = app.add_subcommand("bench", "run a noise type x ratio x seed grid");
  std::string bch_config;
  std::string bch_types = "symmetric,asymmetric,flip";
  std::string bch_ratios = "0.1,0.2,0.3,0.4";
  std::size_t bch_threads = 0;
  Overrides bch_over;
  bch->add_option("--config,-c", bch_config, "TOML-style config file");
  bch->add_option("--noise-types", bch_types, "comma-separated noise types")->capture_default_str();
  bch->add_option("--noise-ratios", bch_ratios, "comma-separated noise ratios")->capture_default_str();
  bch->add_option("--threads", bch_threads, "worker threads (0 = all cores; SREA_THREADS caps)");
  add_experiment_options(bch, bch_over);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << code_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_data(generator, gen_n, gen_length, gen_days, gen_season, gen_seed, gen_out, out);
    }
    if (win->parsed()) {
      return cmd_windowize(win_in, win_out, win_len, win_stride, win_factor, win_levels, win_pmax, out);
    }
    if (cor->parsed()) return cmd_corrupt(cor_in, cor_out, cor_oracle, cor_type, cor_ratio, cor_seed, out);
    if (trn->parsed()) return cmd_train(resolve_config(trn_config, trn_over), trn_quiet, out);
    if (evl->parsed()) return cmd_eval(evl_ckpt, evl_data, evl_raw, evl_out, out);
    if (cmp->parsed()) return cmd_compare(cmp_dirs, cmp_out, cmp_alpha, cmp_one_sided, out);
    if (bch->parsed()) {
      return cmd_bench(resolve_config(bch_config, bch_over), bch_types, bch_ratios, bch_threads, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const algo::NonFiniteLoss& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("srea");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace srea::cli
