#include "srea/data/series.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srea::data {

std::size_t Series::channel_index(std::string_view name) const {
  for (std::size_t c = 0; c < channel_names.size(); ++c) {
    if (channel_names[c] == name) return c;
  }
  throw std::out_of_range("series has no channel '" + std::string(name) + "'");
}

const std::vector<double>& Series::channel(std::string_view name) const {
  return columns.at(channel_index(name));
}

std::string format_iso8601(std::int64_t seconds) {
  using namespace std::chrono;
  const std::int64_t day_seconds = 86400;
  std::int64_t days = seconds / day_seconds;
  std::int64_t rem = seconds % day_seconds;
  if (rem < 0) {
    rem += day_seconds;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t width) {
  int v = 0;
  if (pos + width > text.size()) throw std::invalid_argument("timestamp too short");
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, v);
  if (ec != std::errc() || ptr != text.data() + pos + width) {
    throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  if (!text.empty() && (text.back() == 'Z' || text.back() == 'z')) text.remove_suffix(1);
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':') {
    throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");
  }
  const int y = read_int(text, 0, 4);
  const int mo = read_int(text, 5, 2);
  const int d = read_int(text, 8, 2);
  const int h = read_int(text, 11, 2);
  const int mi = read_int(text, 14, 2);
  int s = 0;
  if (text.size() > 16) {
    if (text.size() != 19 || text[16] != ':') {
      throw std::invalid_argument("malformed timestamp '" + std::string(text) + "'");
    }
    s = read_int(text, 17, 2);
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw std::invalid_argument("timestamp out of range '" + std::string(text) + "'");
  }
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + s;
}

void write_series_csv(const std::filesystem::path& path, const Series& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "timestamp";
  for (const auto& name : series.channel_names) out << ',' << name;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < series.size(); ++r) {
    out << format_iso8601(series.timestamps[r]);
    for (const auto& column : series.columns) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), column[r]);
      (void)ec;
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

Series read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  Series series;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream header(line);
    std::string field;
    std::getline(header, field, ',');
    while (std::getline(header, field, ',')) series.channel_names.push_back(field);
  }
  if (series.channel_names.empty()) {
    throw std::runtime_error("'" + path.string() + "' has no data columns");
  }
  series.columns.resize(series.channel_names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    series.timestamps.push_back(parse_iso8601(field));
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
      if (!std::getline(row, field, ',')) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": missing column");
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": non-numeric field '" + field + "'");
      }
      series.columns[c].push_back(v);
    }
  }
  return series;
}

}  // namespace srea::data
