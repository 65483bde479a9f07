#include "srea/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace srea::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for '" + std::string(key) +
                    "' (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view text) {
  const std::string v = unquote(text);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, text, "a number");
  }
  return out;
}

long long to_integer(std::string_view key, std::string_view text) {
  const std::string v = unquote(text);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, text, "an integer");
  return out;
}

std::size_t to_size(std::string_view key, std::string_view text) {
  const long long v = to_integer(key, text);
  if (v < 0) bad_value(key, text, "a nonnegative integer");
  return static_cast<std::size_t>(v);
}

int to_int(std::string_view key, std::string_view text) {
  const long long v = to_integer(key, text);
  if (v < -1000000000LL || v > 1000000000LL) bad_value(key, text, "an integer in range");
  return static_cast<int>(v);
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string v = unquote(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, text, "true or false");
}

std::vector<std::string> split_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError("unterminated array '" + std::string(text) + "'");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (!piece.empty()) out.push_back(unquote(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
  return s;
}

// Strips a trailing '#' comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& piece : split_list(text)) {
    const auto dots = piece.find("..");
    if (dots != std::string::npos) {
      const auto lo = static_cast<std::uint64_t>(to_size("seeds", piece.substr(0, dots)));
      const auto hi = static_cast<std::uint64_t>(to_size("seeds", piece.substr(dots + 2)));
      if (hi < lo) throw ConfigError("empty seed range '" + piece + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(static_cast<std::uint64_t>(to_size("seeds", piece)));
    }
  }
  return seeds;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  if (key == "dataset") {
    c.dataset = unquote(value);
  } else if (key == "train_path") {
    c.train_path = unquote(value);
  } else if (key == "test_path") {
    c.test_path = unquote(value);
  } else if (key == "n") {
    c.n = to_size(key, value);
  } else if (key == "length") {
    c.length = to_size(key, value);
  } else if (key == "days") {
    c.days = to_size(key, value);
  } else if (key == "season") {
    const std::string v = unquote(value);
    if (v == "heating") {
      c.season = data::Season::heating;
    } else if (v == "summer") {
      c.season = data::Season::summer;
    } else {
      bad_value(key, value, "heating or summer");
    }
  } else if (key == "split_ratio") {
    c.split_ratio = to_double(key, value);
  } else if (key == "data_seed") {
    c.data_seed = static_cast<std::uint64_t>(to_size(key, value));
  } else if (key == "noise_type") {
    try {
      c.noise_type = noise::parse_noise_kind(unquote(value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "noise_ratio") {
    c.noise_ratio = to_double(key, value);
  } else if (key == "algorithm") {
    c.algorithm = unquote(value);
  } else if (key == "epochs") {
    c.epochs = to_int(key, value);
  } else if (key == "lambda_init") {
    c.schedule.lambda_init = to_int(key, value);
  } else if (key == "delta_start") {
    c.schedule.delta_start = to_int(key, value);
  } else if (key == "delta_end") {
    c.schedule.delta_end = to_int(key, value);
  } else if (key == "use_ae") {
    c.flags.use_ae = to_bool(key, value);
  } else if (key == "use_cc") {
    c.flags.use_cc = to_bool(key, value);
  } else if (key == "use_prior") {
    c.flags.use_prior = to_bool(key, value);
  } else if (key == "halve_pseudo_sum") {
    c.halve_pseudo_sum = to_bool(key, value);
  } else if (key == "coupled_weight_decay") {
    c.coupled_weight_decay = to_bool(key, value);
  } else if (key == "encoder_channels") {
    c.architecture.encoder_channels.clear();
    for (const auto& piece : split_list(value)) c.architecture.encoder_channels.push_back(to_size(key, piece));
  } else if (key == "embedding_dim") {
    c.architecture.embedding_dim = to_size(key, value);
  } else if (key == "classifier_hidden") {
    c.architecture.classifier_hidden = to_size(key, value);
  } else if (key == "dropout") {
    c.architecture.dropout = to_double(key, value);
  } else if (key == "seeds") {
    c.seeds = parse_seed_list(value);
  } else if (key == "output_dir") {
    c.output_dir = unquote(value);
  } else if (key == "save_checkpoints") {
    c.save_checkpoints = to_bool(key, value);
  } else if (key == "name") {
    c.name = unquote(value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": tables are not supported; use flat keys");
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> kDatasets{"cbf", "chp", "tsv", "cache"};
  if (kDatasets.count(dataset) == 0) {
    throw ConfigError("dataset must be one of cbf, chp, tsv, cache; got '" + dataset + "'");
  }
  if ((dataset == "tsv" || dataset == "cache") && train_path.empty()) {
    throw ConfigError("dataset '" + dataset + "' needs train_path");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie in (0, 1)");
  if (!(noise_ratio >= 0.0 && noise_ratio < 1.0)) throw ConfigError("noise_ratio must lie in [0, 1)");
  if (algorithm != "srea" && algorithm != "ce") {
    throw ConfigError("algorithm must be srea or ce; got '" + algorithm + "'");
  }
  if (epochs < 1) throw ConfigError("epochs must be positive");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (algorithm == "srea") {
    try {
      schedule.validate(epochs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (architecture.encoder_channels.empty()) throw ConfigError("encoder_channels must not be empty");
  if (architecture.embedding_dim == 0 || architecture.classifier_hidden == 0) {
    throw ConfigError("embedding_dim and classifier_hidden must be positive");
  }
  if (!(architecture.dropout >= 0.0 && architecture.dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
}

algo::TrainConfig ExperimentConfig::train_config() const {
  algo::TrainConfig t = algorithm == "ce" ? algo::cross_entropy_config(epochs) : algo::TrainConfig{};
  t.epochs = epochs;
  if (algorithm == "srea") {
    t.schedule = schedule;
    t.flags = flags;
    t.halve_pseudo_sum = halve_pseudo_sum;
  }
  t.adam.decoupled = !coupled_weight_decay;
  return t;
}

std::string canonical_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto str = [&os](const char* key, const std::string& v) { os << key << " = \"" << v << "\"\n"; };
  auto num = [&os](const char* key, auto v) { os << key << " = " << v << "\n"; };
  auto real = [&os](const char* key, double v) { os << key << " = " << format_double(v) << "\n"; };
  auto flag = [&os](const char* key, bool v) { os << key << " = " << (v ? "true" : "false") << "\n"; };

  str("dataset", c.dataset);
  if (c.dataset == "tsv" || c.dataset == "cache") {
    str("train_path", c.train_path);
    str("test_path", c.test_path);
  }
  if (c.dataset == "cbf") {
    num("n", c.n);
    num("length", c.length);
  }
  if (c.dataset == "chp") {
    num("days", c.days);
    str("season", c.season == data::Season::summer ? "summer" : "heating");
  }
  if (c.test_path.empty()) real("split_ratio", c.split_ratio);
  num("data_seed", c.data_seed);
  str("noise_type", std::string(noise::to_string(c.noise_type)));
  real("noise_ratio", c.noise_ratio);
  str("algorithm", c.algorithm);
  num("epochs", c.epochs);
  if (c.algorithm == "srea") {
    num("lambda_init", c.schedule.lambda_init);
    num("delta_start", c.schedule.delta_start);
    num("delta_end", c.schedule.delta_end);
    flag("use_ae", c.flags.use_ae);
    flag("use_cc", c.flags.use_cc);
    flag("use_prior", c.flags.use_prior);
    flag("halve_pseudo_sum", c.halve_pseudo_sum);
  }
  flag("coupled_weight_decay", c.coupled_weight_decay);
  os << "encoder_channels = [";
  for (std::size_t i = 0; i < c.architecture.encoder_channels.size(); ++i) {
    os << (i ? ", " : "") << c.architecture.encoder_channels[i];
  }
  os << "]\n";
  num("embedding_dim", c.architecture.embedding_dim);
  num("classifier_hidden", c.architecture.classifier_hidden);
  real("dropout", c.architecture.dropout);
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace srea::cli
