// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. `--only 1,4` restricts the run.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "srea/algo/schedule.hpp"
#include "srea/cli/config.hpp"
#include "srea/cli/experiment.hpp"
#include "srea/eval/critical_difference.hpp"
#include "srea/eval/friedman.hpp"
#include "srea/eval/mann_whitney.hpp"
#include "srea/noise/transition.hpp"
#include "stats_oracle.hpp"

#ifndef SREA_TOOL_PATH
#define SREA_TOOL_PATH "srea"
#endif

namespace fs = std::filesystem;
using namespace srea;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

// ---------------------------------------------------------------------------

Outcome gradients() {
  const double t0 = cpu_seconds();
  core::Rng rng(20240601);
  double worst = 0.0;
  std::string worst_op;
  std::size_t instances = 0;
  for (const auto& op : testing::differentiable_ops()) {
    for (int i = 0; i < 20; ++i) {
      auto c = op.make(rng);
      const auto r = testing::check_gradients(c, rng, 1e-5);
      ++instances;
      if (r.max_rel_error > worst) {
        worst = r.max_rel_error;
        worst_op = op.name;
      }
    }
  }
  const double secs = cpu_seconds() - t0;
  return {worst < 1e-4 && secs < 60.0,
          std::to_string(testing::differentiable_ops().size()) + " ops x 20 instances, max rel error " +
              fmt("%.2e", worst) + " (" + worst_op + "), " + fmt("%.1f", secs) + " s"};
}

Outcome schedules() {
  core::Rng rng(7);
  std::size_t mismatches = 0, checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const algo::ScheduleParams s{static_cast<int>(rng.uniform_int(0, 40)),
                                 static_cast<int>(rng.uniform_int(0, 40)),
                                 static_cast<int>(rng.uniform_int(0, 40))};
    const int end = s.lambda_init + s.delta_start + s.delta_end + 10;
    for (int t = 0; t <= end; ++t) {
      // closed forms: linear ramps clamped to [0, 1]; a zero-length ramp is a step
      const double a_ref =
          s.delta_start == 0
              ? (t >= s.lambda_init ? 1.0 : 0.0)
              : std::clamp(static_cast<double>(t - s.lambda_init) / static_cast<double>(s.delta_start), 0.0, 1.0);
      const int ls = s.lambda_init + s.delta_start;
      const double w_ref =
          s.delta_end == 0
              ? (t >= ls ? 1.0 : 0.0)
              : std::clamp(static_cast<double>(t - ls) / static_cast<double>(s.delta_end), 0.0, 1.0);
      mismatches += algo::alpha_at(t, s) != a_ref ? 1 : 0;
      mismatches += algo::w_at(t, s) != w_ref ? 1 : 0;
      checked += 2;
    }
  }
  return {mismatches == 0,
          std::to_string(checked) + " values over 100 random triples, " + std::to_string(mismatches) +
              " mismatches"};
}

Outcome noise_matrices() {
  const double t0 = cpu_seconds();
  using noise::NoiseKind;
  double worst_dev = 0.0;
  for (auto kind : {NoiseKind::symmetric, NoiseKind::asymmetric, NoiseKind::flip}) {
    for (std::size_t k = 2; k <= 20; ++k) {
      for (int e = 0; e <= 9; ++e) {
        const auto T = noise::build_transition(kind, k, e / 10.0);
        for (std::size_t i = 0; i < k; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            if (T(i, j) < 0.0) worst_dev = 1.0;
            s += T(i, j);
          }
          worst_dev = std::max(worst_dev, std::fabs(s - 1.0));
        }
      }
    }
  }

  // Goodness of fit of the sampled labels, one pooled test per setting.
  const std::size_t n = 100000;
  core::Rng rng(31);
  double min_p = 1.0;
  std::ostringstream ps;
  for (auto kind : {NoiseKind::symmetric, NoiseKind::asymmetric, NoiseKind::flip}) {
    for (std::size_t k : {3u, 5u}) {
      const auto T = noise::build_transition(kind, k, 0.3);
      std::vector<int> labels(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
      const auto c = noise::corrupt(labels, T, rng);
      std::vector<double> observed(k * k, 0.0), row_n(k, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        observed[static_cast<std::size_t>(labels[i]) * k + static_cast<std::size_t>(c.labels[i])] += 1;
        row_n[static_cast<std::size_t>(labels[i])] += 1;
      }
      double chi2 = 0.0;
      double df = 0.0;
      bool impossible = false;
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t cells = 0;
        for (std::size_t j = 0; j < k; ++j) {
          const double expected = T(i, j) * row_n[i];
          if (expected == 0.0) {
            impossible = impossible || observed[i * k + j] > 0;
            continue;
          }
          chi2 += (observed[i * k + j] - expected) * (observed[i * k + j] - expected) / expected;
          ++cells;
        }
        df += static_cast<double>(cells - 1);
      }
      const double p =
          impossible ? 0.0
                     : (df > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), chi2))
                               : 1.0);
      min_p = std::min(min_p, p);
      ps << ' ' << noise::to_string(kind) << "/k" << k << "=" << fmt("%.3f", p);
    }
  }
  const double secs = cpu_seconds() - t0;
  return {worst_dev <= 1e-12 && min_p >= 0.01 && secs < 30.0,
          "max row deviation " + fmt("%.1e", worst_dev) + "; chi2 p:" + ps.str() + "; " +
              fmt("%.1f", secs) + " s"};
}

Outcome statistics() {
  const double t0 = cpu_seconds();
  core::Rng rng(99);
  std::size_t cases = 0;
  double worst = 0.0;
  // Every size pair with min group size <= 8 (larger side up to 10).
  for (std::size_t na = 3; na <= 10; ++na) {
    for (std::size_t nb = 3; nb <= 10; ++nb) {
      if (std::min(na, nb) > 8) continue;
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> a(na), b(nb);
        const double shift = rep * 0.4;
        for (auto& v : a) v = rng.uniform();
        for (auto& v : b) v = rng.uniform() + shift;
        const auto r = eval::mann_whitney_u(a, b, 0.05, eval::Alternative::two_sided, eval::MwuMethod::exact);
        const double oracle = testing::enumerated_mwu_p(a, b);
        worst = std::max(worst, std::fabs(r.p - oracle));
        ++cases;
      }
    }
  }
  const auto fr = eval::friedman_test(testing::worked_example());
  const auto ranks = testing::brute_force_mean_ranks(testing::worked_example());
  bool friedman_ok = std::fabs(fr.chi2 - testing::kWorkedChi2) < 1e-9 &&
                     std::fabs(fr.f_stat - testing::kWorkedF) < 1e-9 &&
                     std::fabs(fr.chi2 - testing::friedman_chi2_formula(ranks, 4)) < 1e-9;
  for (std::size_t i = 0; i < ranks.size(); ++i) friedman_ok = friedman_ok && std::fabs(fr.mean_ranks[i] - ranks[i]) < 1e-12;
  const double cd = eval::nemenyi_cd(6, 10, 0.05);
  const double secs = cpu_seconds() - t0;
  return {worst < 1e-12 && friedman_ok && std::fabs(cd - 2.384) < 1e-3 && secs < 60.0,
          std::to_string(cases) + " exact MWU cases, max |p - oracle| " + fmt("%.1e", worst) +
              "; Friedman worked example " + (friedman_ok ? "ok" : "MISMATCH") + "; CD(6,10) " +
              fmt("%.4f", cd) + "; " + fmt("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------------------

struct CbfRuns {
  std::vector<double> srea, ce, lc_only, restored;
  double srea_cpu = 0.0;
};

cli::ExperimentConfig cbf_config() {
  cli::ExperimentConfig c;
  c.dataset = "cbf";
  c.n = 930;
  c.length = 128;
  c.noise_type = noise::NoiseKind::symmetric;
  c.noise_ratio = 0.3;
  c.epochs = 100;
  return c;
}

const CbfRuns& cbf_runs() {
  static const CbfRuns runs = [] {
    CbfRuns r;
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      const double t0 = cpu_seconds();
      const auto full = cli::run_experiment(cbf_config(), seed);
      r.srea_cpu += cpu_seconds() - t0;
      r.srea.push_back(full.test_macro_f1);
      r.restored.push_back(full.restored_fraction.value_or(0.0));
      std::cerr << "  [cbf seed " << seed << "] srea F1 " << full.test_macro_f1 << ", restored "
                << r.restored.back() << '\n';

      auto ce = cbf_config();
      ce.algorithm = "ce";
      r.ce.push_back(cli::run_experiment(ce, seed).test_macro_f1);
      std::cerr << "  [cbf seed " << seed << "] ce F1 " << r.ce.back() << '\n';

      auto lc = cbf_config();
      lc.flags.use_ae = false;
      lc.flags.use_cc = false;
      r.lc_only.push_back(cli::run_experiment(lc, seed).test_macro_f1);
      std::cerr << "  [cbf seed " << seed << "] L_c only F1 " << r.lc_only.back() << '\n';
    }
    return r;
  }();
  return runs;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.3f", v[i]);
  return s + "]";
}

Outcome reproduction() {
  const auto& r = cbf_runs();
  const double f1 = mean(r.srea), restored = mean(r.restored);
  return {f1 >= 0.90 && restored >= 0.85 && r.srea_cpu <= 1200.0,
          "mean macro-F1 " + fmt("%.3f", f1) + " " + list(r.srea) + ", restored " + fmt("%.3f", restored) +
              " " + list(r.restored) + ", " + fmt("%.0f", r.srea_cpu) + " s CPU"};
}

Outcome baseline_ordering() {
  const auto& r = cbf_runs();
  int wins = 0;
  for (std::size_t i = 0; i < r.srea.size(); ++i) wins += r.srea[i] - r.ce[i] >= 0.05 ? 1 : 0;
  return {wins >= 2, "SREA " + list(r.srea) + " vs CE " + list(r.ce) + ", margin >= 0.05 in " +
                         std::to_string(wins) + "/3 seeds"};
}

Outcome ablation() {
  const auto& r = cbf_runs();
  const double gap = mean(r.srea) - mean(r.lc_only);
  return {gap >= 0.15, "full " + fmt("%.3f", mean(r.srea)) + " vs L_c only " + fmt("%.3f", mean(r.lc_only)) +
                           " " + list(r.lc_only) + ", gap " + fmt("%.3f", gap)};
}

Outcome flip_robustness() {
  const double t0 = cpu_seconds();
  cli::ExperimentConfig c;
  c.dataset = "chp";
  c.days = 60;
  c.noise_type = noise::NoiseKind::flip;
  c.noise_ratio = 0.3;
  const std::uint64_t seed = 0;

  // The injector must leave every true class-0 label alone.
  const auto prepared = cli::prepare_data(c, seed);
  const std::size_t k = prepared.train.num_classes;
  const auto confusion = prepared.oracle.confusion(prepared.train.labels, k);
  std::size_t class0_moved = 0;
  for (std::size_t j = 1; j < k; ++j) class0_moved += confusion[j];

  const auto result = cli::run_experiment(c, seed);
  const double secs = cpu_seconds() - t0;
  return {result.test_macro_f1 >= 0.85 && class0_moved == 0 && secs <= 1200.0,
          "macro-F1 " + fmt("%.3f", result.test_macro_f1) + " on " + std::to_string(result.train_size) +
              " train windows, corrupted " + std::to_string(prepared.oracle.corrupted_count()) +
              ", class-0 labels changed " + std::to_string(class0_moved) + ", " + fmt("%.0f", secs) +
              " s CPU"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "srea_acceptance_determinism";
  fs::remove_all(root);
  auto invoke = [&](const std::string& out) {
    const std::string cmd = std::string("\"") + SREA_TOOL_PATH +
                            "\" train --dataset cbf --n 300 --noise-ratio 0.3 --epochs 12 "
                            "--lambda-init 2 --delta-start 4 --delta-end 4 --seeds 5 --quiet -o \"" +
                            (root / out).string() + "\" > /dev/null";
    return std::system(cmd.c_str());
  };
  const int a = invoke("a");
  const int b = invoke("b");
  bool same = a == 0 && b == 0;
  std::string why;
  for (const char* f : {"metrics_seed5.json", "trace_seed5.jsonl", "confusion_seed5.csv"}) {
    const auto x = slurp(root / "a" / f), y = slurp(root / "b" / f);
    if (x.empty() || x != y) {
      same = false;
      why += std::string(" ") + f + " differs;";
    }
  }
  fs::remove_all(root);
  return {same, same ? "two CLI train invocations, metrics/trace/confusion byte-identical"
                     : "exit codes " + std::to_string(a) + "/" + std::to_string(b) + ";" + why};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradients},
      {"schedule exactness", schedules},
      {"noise matrices", noise_matrices},
      {"statistics oracles", statistics},
      {"CBF reproduction", reproduction},
      {"baseline ordering", baseline_ordering},
      {"ablation direction", ablation},
      {"flip-noise robustness", flip_robustness},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && only.count(id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << id << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL")
              << " | " << o.detail << " | " << fmt("%.1f", wall) << " s wall" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
