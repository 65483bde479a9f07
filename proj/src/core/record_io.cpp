#include "srea/core/record_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace srea::core {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'R', 'E', 'A'};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
  out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!get_bytes(in, b, 4)) {
    throw FormatError(std::string("record file truncated while reading ") + what);
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(std::string("record ") + what + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_records(std::ostream& out, const std::vector<Record>& records) {
  out.write(kMagic.data(), kMagic.size());
  put_u16(out, kRecordFormatVersion);
  for (const auto& r : records) {
    if (numel(r.shape) != r.values.size()) {
      throw FormatError("record '" + r.name + "': shape " + shape_string(r.shape) +
                        " does not match payload of " + std::to_string(r.values.size()));
    }
    put_u32(out, checked_u32(r.name.size(), "name length"));
    out.write(r.name.data(), static_cast<std::streamsize>(r.name.size()));
    put_u32(out, checked_u32(r.shape.size(), "rank"));
    for (std::size_t extent : r.shape) put_u32(out, checked_u32(extent, "extent"));
    for (float v : r.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) {
    throw FormatError("failed writing record stream");
  }
}

std::vector<Record> read_records(std::istream& in) {
  std::array<unsigned char, 6> header{};
  if (!get_bytes(in, header.data(), header.size()) ||
      std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("not an SREA record file (bad magic)");
  }
  const std::uint16_t version =
      static_cast<std::uint16_t>(header[4] | (static_cast<std::uint16_t>(header[5]) << 8));
  if (version != kRecordFormatVersion) {
    throw FormatError("unsupported record format version " + std::to_string(version));
  }
  std::vector<Record> records;
  while (in.peek() != std::char_traits<char>::eof()) {
    Record r;
    const std::uint32_t name_len = get_u32(in, "name length");
    r.name.resize(name_len);
    if (!get_bytes(in, reinterpret_cast<unsigned char*>(r.name.data()), name_len)) {
      throw FormatError("record file truncated in record name");
    }
    const std::uint32_t rank = get_u32(in, "rank");
    r.shape.resize(rank);
    for (auto& extent : r.shape) extent = get_u32(in, "extent");
    r.values.resize(numel(r.shape));
    for (auto& v : r.values) v = std::bit_cast<float>(get_u32(in, "payload"));
    records.push_back(std::move(r));
  }
  return records;
}

void write_record_file(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot open " + path.string() + " for writing");
  }
  write_records(out, records);
}

std::vector<Record> read_record_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open " + path.string());
  }
  return read_records(in);
}

const Record* try_find_record(const std::vector<Record>& records, const std::string& name) {
  for (const auto& r : records) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const Record& find_record(const std::vector<Record>& records, const std::string& name) {
  if (const Record* r = try_find_record(records, name)) return *r;
  throw FormatError("missing record '" + name + "'");
}

}  // namespace srea::core
