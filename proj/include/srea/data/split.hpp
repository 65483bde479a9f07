#pragma once

#include <cstddef>
#include <vector>

#include "srea/core/rng.hpp"
#include "srea/data/dataset.hpp"

namespace srea::data {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified random split. The training part holds round(ratio * n)
/// samples; per-class quotas come from largest-remainder rounding of
/// ratio * n_class, so every class keeps its proportion within one sample.
SplitIndices stratified_split_indices(const Dataset& dataset, double ratio, core::Rng& rng);

struct Split {
  Dataset train;
  Dataset test;
  SplitIndices indices;
};

Split split(const Dataset& dataset, double ratio, core::Rng& rng);

}  // namespace srea::data
