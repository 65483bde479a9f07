#include "srea/data/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace srea::data {

namespace {

struct RawFile {
  std::vector<std::string> labels;
  std::vector<std::vector<float>> rows;
};

double parse_number(const std::string& token, const std::filesystem::path& path,
                    std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    if (token == "NaN" || token == "nan") return std::nan("");
    throw std::runtime_error(path.string() + ":" + std::to_string(line) +
                             ": non-numeric field '" + token + "'");
  }
  return v;
}

bool try_parse(const std::string& token, double& v) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last;
}

// Integral numeric labels are canonicalized so "1", "1.0" and "+1" coincide;
// anything else is kept verbatim as a class name.
std::string canonical_label(const std::string& token) {
  double v = 0.0;
  if (try_parse(token, v) && std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  return token;
}

RawFile read_raw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  RawFile raw;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    raw.labels.push_back(canonical_label(token));
    std::vector<float> row;
    while (fields >> token) row.push_back(static_cast<float>(parse_number(token, path, line_no)));
    if (row.empty()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": row has a label but no values");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": ragged row (" +
                               std::to_string(row.size()) + " values, expected " +
                               std::to_string(width) + ")");
    }
    raw.rows.push_back(std::move(row));
  }
  if (raw.rows.empty()) throw std::runtime_error("'" + path.string() + "' contains no samples");
  return raw;
}

bool numeric_less(const std::string& a, const std::string& b) {
  double va = 0.0;
  double vb = 0.0;
  const bool na = try_parse(a, va);
  const bool nb = try_parse(b, vb);
  if (na && nb && va != vb) return va < vb;
  if (na != nb) return na;
  return a < b;
}

}  // namespace

Dataset load_tsv(const std::vector<std::filesystem::path>& channel_files,
                 const std::vector<std::string>& class_order) {
  if (channel_files.empty()) throw std::invalid_argument("load_tsv: no files given");
  std::vector<RawFile> files;
  for (const auto& p : channel_files) files.push_back(read_raw(p));

  const RawFile& first = files.front();
  for (std::size_t c = 1; c < files.size(); ++c) {
    if (files[c].rows.size() != first.rows.size() ||
        files[c].rows.front().size() != first.rows.front().size()) {
      throw std::runtime_error("channel file '" + channel_files[c].string() +
                               "' does not align with '" + channel_files[0].string() + "'");
    }
    if (files[c].labels != first.labels) {
      throw std::runtime_error("label set mismatch between '" + channel_files[0].string() +
                               "' and '" + channel_files[c].string() + "'");
    }
  }

  std::vector<std::string> classes = class_order;
  if (classes.empty()) {
    classes = first.labels;
    std::sort(classes.begin(), classes.end(), numeric_less);
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  }
  std::map<std::string, int> index;
  for (std::size_t j = 0; j < classes.size(); ++j) index[classes[j]] = static_cast<int>(j);

  Dataset out;
  out.name = channel_files.front().stem().string();
  out.channels = files.size();
  out.length = first.rows.front().size();
  out.num_classes = classes.size();
  out.class_names = classes;
  const std::size_t n = first.rows.size();
  out.samples.reserve(n * out.channels * out.length);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = index.find(first.labels[i]);
    if (it == index.end()) {
      throw std::runtime_error("label '" + first.labels[i] + "' in '" +
                               channel_files[0].string() + "' is not a known class");
    }
    out.labels.push_back(it->second);
    for (const auto& f : files) out.samples.insert(out.samples.end(), f.rows[i].begin(), f.rows[i].end());
  }
  out.validate();
  return out;
}

Dataset load_tsv(const std::filesystem::path& path, const std::vector<std::string>& class_order) {
  return load_tsv(std::vector<std::filesystem::path>{path}, class_order);
}

void write_tsv(const std::vector<std::filesystem::path>& channel_files, const Dataset& dataset) {
  dataset.validate();
  if (channel_files.size() != dataset.channels) {
    throw std::invalid_argument("write_tsv: " + std::to_string(dataset.channels) +
                                "-channel data needs one file per channel, got " +
                                std::to_string(channel_files.size()));
  }
  for (std::size_t c = 0; c < dataset.channels; ++c) {
    std::ofstream out(channel_files[c]);
    if (!out) throw std::runtime_error("cannot write '" + channel_files[c].string() + "'");
    char buf[32];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto y = static_cast<std::size_t>(dataset.labels[i]);
      out << (dataset.class_names.empty() ? std::to_string(y) : dataset.class_names[y]);
      auto s = dataset.sample(i).subspan(c * dataset.length, dataset.length);
      for (float v : s) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        out << '\t' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
      }
      out << '\n';
    }
  }
}

}  // namespace srea::data
