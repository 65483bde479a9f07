#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srea/cli/config.hpp"
#include "srea/cli/experiment.hpp"

namespace srea::cli {

struct BenchGrid {
  std::vector<noise::NoiseKind> types;
  std::vector<double> ratios;
  std::vector<std::uint64_t> seeds;
};

struct BenchJob {
  ExperimentConfig config;  // noise fields set for this cell
  std::uint64_t seed = 0;
  std::filesystem::path dir;     // per-condition output directory
  std::filesystem::path marker;  // written once the run's results are stored
};

/// One job per (type, ratio, seed), in that nesting order. Each condition
/// gets the directory <output_dir>/<type>_<ratio>.
std::vector<BenchJob> expand_grid(const ExperimentConfig& base, const BenchGrid& grid);

/// Requested workers (0 = hardware concurrency), capped by SREA_THREADS
/// when set, and by the job count; at least 1.
std::size_t worker_count(std::size_t requested, std::size_t jobs);

struct BenchSummary {
  std::size_t scheduled = 0;
  std::size_t skipped = 0;  // completion marker already present
  std::size_t completed = 0;
  std::size_t failed = 0;
};

using RunFunction = std::function<RunResult(const ExperimentConfig&, std::uint64_t)>;

/// Runs the pending jobs on `workers` threads. Each worker owns one run at a
/// time; a single writer thread appends results, writes the per-run files
/// and the completion marker, and logs progress.
BenchSummary run_bench(const std::vector<BenchJob>& jobs, std::size_t workers, std::ostream& log,
                       const RunFunction& run = {});

}  // namespace srea::cli
