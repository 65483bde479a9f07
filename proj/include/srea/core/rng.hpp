#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace srea::core {

// Consumers that draw randomness during an experiment. Each gets its own
// substream so that, e.g., changing the dropout rate never shifts the
// train/test split.
enum class Stream : std::uint64_t {
  init = 1,
  dropout = 2,
  noise = 3,
  split = 4,
  shuffle = 5,
  kmeans = 6,
  data = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic generator: std::mt19937_64 seeded through SplitMix64.
///
/// Substreams are derived by hashing (seed, stream id) with SplitMix64, so a
/// substream depends only on its parent's seed and never on how much of the
/// parent stream has been consumed. All derived quantities (uniform doubles,
/// bounded integers, normals) are computed here rather than through the
/// standard distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  Rng substream(Stream stream) const;
  Rng substream(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t uniform_index(std::size_t n);
  /// Uniform integer in [lo, hi] (inclusive).
  long uniform_int(long lo, long hi);

  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace srea::core
