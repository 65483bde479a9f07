#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "srea/data/dataset.hpp"

namespace srea::data {

/// Reads UCR-style text files: one sample per line, a label followed by the
/// series values, separated by tabs or spaces. Multivariate data comes as
/// one file per channel with rows aligned across files.
///
/// Labels are remapped to [0, k) in ascending numeric order of the original
/// values, which are kept as class_names. Passing `class_order` (e.g. the
/// class_names of the matching training file) pins the mapping instead; a
/// label outside it is an error.
Dataset load_tsv(const std::vector<std::filesystem::path>& channel_files,
                 const std::vector<std::string>& class_order = {});
Dataset load_tsv(const std::filesystem::path& path,
                 const std::vector<std::string>& class_order = {});

/// Writes one file per channel in the format load_tsv reads. Labels are
/// written as class_names when present, else as the integer index.
void write_tsv(const std::vector<std::filesystem::path>& channel_files, const Dataset& dataset);

}  // namespace srea::data
