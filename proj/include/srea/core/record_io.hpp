#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "srea/core/tensor.hpp"

namespace srea::core {

// Binary record file layout (all integers little-endian):
//
//   "SREA"                     4 magic bytes
//   u16 version                currently 1
//   repeated until EOF:
//     u32 name_length, name bytes (UTF-8)
//     u32 rank, rank x u32 extents
//     product(extents) x f32 payload (IEEE-754, little-endian)
//
// Model checkpoints, dataset caches and label-oracle files all use it.

inline constexpr std::uint16_t kRecordFormatVersion = 1;

struct Record {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_records(std::ostream& out, const std::vector<Record>& records);
std::vector<Record> read_records(std::istream& in);

void write_record_file(const std::filesystem::path& path, const std::vector<Record>& records);
std::vector<Record> read_record_file(const std::filesystem::path& path);

const Record& find_record(const std::vector<Record>& records, const std::string& name);
const Record* try_find_record(const std::vector<Record>& records, const std::string& name);

}  // namespace srea::core
