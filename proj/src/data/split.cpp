#include "srea/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace srea::data {

SplitIndices stratified_split_indices(const Dataset& dataset, double ratio, core::Rng& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  dataset.validate();
  const std::size_t n = dataset.size();
  const std::size_t k = dataset.num_classes;
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(dataset.labels[i])].push_back(i);

  // Largest-remainder allocation of the total training size over classes.
  const auto total = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(n)));
  std::vector<std::size_t> quota(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double exact = ratio * static_cast<double>(members[j].size());
    quota[j] = static_cast<std::size_t>(std::floor(exact));
    remainder[j] = exact - static_cast<double>(quota[j]);
    assigned += quota[j];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total && r < k; ++r) {
    const std::size_t j = order[r];
    if (quota[j] < members[j].size()) {
      ++quota[j];
      ++assigned;
    }
  }

  SplitIndices out;
  for (std::size_t j = 0; j < k; ++j) {
    rng.shuffle(std::span<std::size_t>(members[j]));
    out.train.insert(out.train.end(), members[j].begin(), members[j].begin() + quota[j]);
    out.test.insert(out.test.end(), members[j].begin() + quota[j], members[j].end());
  }
  rng.shuffle(std::span<std::size_t>(out.train));
  rng.shuffle(std::span<std::size_t>(out.test));
  return out;
}

Split split(const Dataset& dataset, double ratio, core::Rng& rng) {
  Split out;
  out.indices = stratified_split_indices(dataset, ratio, rng);
  out.train = dataset.subset(out.indices.train);
  out.test = dataset.subset(out.indices.test);
  return out;
}

}  // namespace srea::data
