#include "srea/cli/bench.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <variant>

#include "json.hpp"

namespace srea::cli {

namespace {

std::string ratio_tag(double ratio) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", ratio);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["name"] = config.name;
  j["config_hash"] = config_hash(config);
  j["code_version"] = code_version();
  j["config"] = canonical_config(config);
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

struct Failure {
  std::string message;
};

struct Outcome {
  const BenchJob* job;
  std::variant<RunResult, Failure> value;
};

}  // namespace

std::vector<BenchJob> expand_grid(const ExperimentConfig& base, const BenchGrid& grid) {
  std::vector<BenchJob> jobs;
  for (auto type : grid.types) {
    for (double ratio : grid.ratios) {
      ExperimentConfig cell = base;
      cell.noise_type = type;
      cell.noise_ratio = ratio;
      const auto dir = std::filesystem::path(base.output_dir) /
                       (std::string(noise::to_string(type)) + "_" + ratio_tag(ratio));
      for (auto seed : grid.seeds) {
        BenchJob job;
        job.config = cell;
        job.config.seeds = {seed};
        job.seed = seed;
        job.dir = dir;
        job.marker = dir / ("run_seed" + std::to_string(seed) + ".done");
        jobs.push_back(std::move(job));
      }
    }
  }
  return jobs;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SREA_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  if (jobs > 0) n = std::min(n, jobs);
  return std::max<std::size_t>(n, 1);
}

BenchSummary run_bench(const std::vector<BenchJob>& jobs, std::size_t workers, std::ostream& log,
                       const RunFunction& run) {
  const RunFunction runner =
      run ? run : RunFunction([](const ExperimentConfig& c, std::uint64_t s) { return run_experiment(c, s); });
  BenchSummary summary;
  summary.scheduled = jobs.size();

  std::vector<const BenchJob*> pending;
  for (const auto& job : jobs) {
    if (std::filesystem::exists(job.marker)) {
      ++summary.skipped;
    } else {
      pending.push_back(&job);
    }
  }
  for (const auto* job : pending) {
    if (!std::filesystem::exists(job->dir / "manifest.json")) write_manifest(job->dir, job->config);
  }

  std::mutex mutex;
  std::condition_variable ready;
  std::deque<Outcome> outbox;
  std::size_t finished_workers = 0;
  std::atomic<std::size_t> next{0};
  const std::size_t n_workers = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(pending.size(), 1));

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) break;
      const BenchJob* job = pending[i];
      Outcome outcome{job, Failure{}};
      try {
        outcome.value = runner(job->config, job->seed);
      } catch (const std::exception& e) {
        outcome.value = Failure{e.what()};
      }
      std::lock_guard<std::mutex> lock(mutex);
      outbox.push_back(std::move(outcome));
      ready.notify_one();
    }
    std::lock_guard<std::mutex> lock(mutex);
    ++finished_workers;
    ready.notify_one();
  };

  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);

  // The calling thread is the single writer.
  std::size_t handled = 0;
  while (true) {
    std::unique_lock<std::mutex> lock(mutex);
    ready.wait(lock, [&] { return !outbox.empty() || finished_workers == n_workers; });
    if (outbox.empty()) break;
    Outcome outcome = std::move(outbox.front());
    outbox.pop_front();
    lock.unlock();

    ++handled;
    const BenchJob& job = *outcome.job;
    if (auto* result = std::get_if<RunResult>(&outcome.value)) {
      write_run_files(job.dir, *result);
      {
        std::ofstream out(job.dir / "results.jsonl", std::ios::app);
        out << result_line(*result) << '\n';
      }
      std::ofstream(job.marker) << result->config_hash << '\n';
      ++summary.completed;
      log << "[" << handled << "/" << pending.size() << "] " << job.dir.filename().string()
          << " seed " << job.seed << ": macro-F1 " << result->test_macro_f1 << '\n';
    } else {
      ++summary.failed;
      log << "[" << handled << "/" << pending.size() << "] " << job.dir.filename().string()
          << " seed " << job.seed << " failed: " << std::get<Failure>(outcome.value).message << '\n';
    }
  }
  for (auto& t : threads) t.join();
  return summary;
}

}  // namespace srea::cli
