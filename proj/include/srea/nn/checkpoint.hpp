#pragma once

#include <filesystem>
#include <vector>

#include "srea/core/record_io.hpp"
#include "srea/nn/model.hpp"

namespace srea::nn {

/// Serializes the architecture, every parameter and batch-norm buffer, plus
/// any caller-supplied extra records (e.g. normalization statistics).
std::vector<core::Record> model_records(const SreaModel& model);

void save_checkpoint(const std::filesystem::path& path, const SreaModel& model,
                     const std::vector<core::Record>& extra = {});

/// Rebuilds a model from records written by model_records. Values are
/// restored bit-for-bit.
SreaModel model_from_records(const std::vector<core::Record>& records);

struct LoadedCheckpoint {
  SreaModel model;
  std::vector<core::Record> records;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace srea::nn
