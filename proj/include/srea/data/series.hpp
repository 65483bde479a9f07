#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srea::data {

/// Regularly sampled multichannel series with wall-clock timestamps
/// (seconds since 1970-01-01T00:00:00, UTC, no leap seconds).
struct Series {
  std::vector<std::int64_t> timestamps;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> columns;  // one per channel, same length as timestamps

  std::size_t size() const { return timestamps.size(); }
  /// Column index of `name`; throws std::out_of_range when absent.
  std::size_t channel_index(std::string_view name) const;
  const std::vector<double>& channel(std::string_view name) const;
};

std::string format_iso8601(std::int64_t seconds);
/// Accepts "YYYY-MM-DDTHH:MM[:SS]" (a space may replace the 'T', a trailing
/// 'Z' is ignored).
std::int64_t parse_iso8601(std::string_view text);

/// CSV with a header row: "timestamp,<channel>,...", one row per time step.
void write_series_csv(const std::filesystem::path& path, const Series& series);
Series read_series_csv(const std::filesystem::path& path);

}  // namespace srea::data
