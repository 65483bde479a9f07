#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "srea/data/dataset.hpp"
#include "srea/data/normalize.hpp"
#include "srea/data/series.hpp"
#include "srea/data/split.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/data/tsv.hpp"
#include "srea/data/windowing.hpp"

using namespace srea::data;
using srea::core::Rng;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("tsv loading remaps labels in numeric order") {
  const auto p = temp_file("srea_test_a.tsv");
  write_text(p, "2\t1.0\t2.0\t3.0\n-1\t0.5 0.5 0.5\n10.0\t1 1 1\n2\t0 0 0\n");
  const auto ds = load_tsv(p);
  CHECK(ds.size() == 4);
  CHECK(ds.length == 3);
  CHECK(ds.num_classes == 3);
  CHECK(ds.class_names == std::vector<std::string>{"-1", "2", "10"});
  CHECK(ds.labels == std::vector<int>{1, 0, 2, 1});
  CHECK(ds.sample(0)[2] == 3.0f);

  const auto pinned = load_tsv(p, {"10", "2", "-1"});
  CHECK(pinned.labels == std::vector<int>{1, 2, 0, 1});
  CHECK_THROWS(load_tsv(p, {"2", "10"}));
  fs::remove(p);
}

TEST_CASE("tsv errors") {
  const auto p = temp_file("srea_test_bad.tsv");
  write_text(p, "1 1 2 3\n2 1 2\n");
  CHECK_THROWS(load_tsv(p));
  write_text(p, "1 1 x 3\n");
  CHECK_THROWS(load_tsv(p));
  write_text(p, "");
  CHECK_THROWS(load_tsv(p));
  fs::remove(p);
}

TEST_CASE("multichannel tsv round trip") {
  Rng rng(3);
  auto ds = generate_cbf(12, 20, rng);
  ds.channels = 1;
  const auto a = temp_file("srea_test_c0.tsv");
  write_tsv({a}, ds);
  const auto back = load_tsv(a);
  CHECK(back.labels.size() == ds.labels.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i] == doctest::Approx(ds.samples[i]).epsilon(1e-6));
  }

  const auto b = temp_file("srea_test_c1.tsv");
  write_text(a, "0 1 2\n1 3 4\n");
  write_text(b, "0 5 6\n1 7 8\n");
  const auto two = load_tsv(std::vector<fs::path>{a, b});
  CHECK(two.channels == 2);
  CHECK(two.sample(1)[2] == 7.0f);
  write_text(b, "1 5 6\n1 7 8\n");
  CHECK_THROWS(load_tsv(std::vector<fs::path>{a, b}));
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("dataset cache round trip") {
  Rng rng(1);
  const auto ds = generate_cbf(30, 32, rng);
  const auto p = temp_file("srea_test_ds.bin");
  save_dataset(p, ds);
  const auto back = load_dataset(p);
  fs::remove(p);
  CHECK(back.samples == ds.samples);
  CHECK(back.labels == ds.labels);
  CHECK(back.class_names == ds.class_names);
  CHECK(back.name == ds.name);
}

TEST_CASE("z-normalization uses training statistics") {
  Dataset train{"t", 2, 2, 2, {1, 3, 10, 10, 3, 5, 20, 20}, {0, 1}, {}};
  Dataset test{"t", 2, 2, 2, {2, 2, 15, 15}, {0}, {}};
  const auto stats = znormalize(train, test);
  CHECK(stats.mean[0] == doctest::Approx(3.0));
  CHECK(stats.stddev[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(stats.stddev[1] == doctest::Approx(5.0));
  CHECK(test.samples[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(test.samples[2] == doctest::Approx(0.0));

  Dataset flat{"f", 1, 3, 1, {4, 4, 4}, {0}, {}};
  znormalize(flat);
  for (float v : flat.samples) CHECK(std::isfinite(v));
}

TEST_CASE("stratified split keeps class proportions") {
  Rng g(2);
  const auto ds = generate_cbf(930, 32, g);
  Rng r1(5), r2(5);
  const auto a = stratified_split_indices(ds, 0.8, r1);
  const auto b = stratified_split_indices(ds, 0.8, r2);
  CHECK(a.train == b.train);
  CHECK(a.train.size() == 744);
  CHECK(a.test.size() == 186);
  std::vector<std::size_t> all(a.train);
  all.insert(all.end(), a.test.begin(), a.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  const auto counts = ds.class_counts();
  const auto s = split(ds, 0.8, r1);
  const auto tc = s.train.class_counts();
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::fabs(static_cast<double>(tc[c]) - 0.8 * static_cast<double>(counts[c])) <= 1.0);
  }
}

TEST_CASE("cbf classes are balanced and shaped") {
  Rng rng(8);
  const auto ds = generate_cbf(300, 128, rng);
  ds.validate();
  const auto counts = ds.class_counts();
  CHECK(counts == std::vector<std::size_t>{100, 100, 100});
  // Funnel ramps down, bell ramps up: compare class-mean halves of the plateau.
  std::vector<double> first(3, 0), second(3, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto s = ds.sample(i);
    const int y = ds.labels[i];
    first[y] += std::accumulate(s.begin() + 32, s.begin() + 64, 0.0);
    second[y] += std::accumulate(s.begin() + 64, s.begin() + 96, 0.0);
  }
  CHECK(first[1] < second[1]);  // bell
  CHECK(first[2] > second[2]);  // funnel
}

TEST_CASE("chp generator physical bounds and daily period") {
  Rng rng(1);
  ChpConfig cfg;
  cfg.days = 30;
  const auto s = generate_chp_like(cfg, rng);
  CHECK(s.size() == 30u * 1440u);
  const auto& p = s.channel("P_CHP");
  for (double v : p) {
    CHECK(v >= 0.0);
    CHECK(v <= cfg.p_max);
  }
  // Autocorrelation of the 10-minute resampled net load peaks near one day.
  const auto x = block_mean(s.channel("P_tot"), 10);
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  auto acf = [&](std::size_t lag) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      den += (x[i] - m) * (x[i] - m);
      if (i + lag < x.size()) num += (x[i] - m) * (x[i + lag] - m);
    }
    return num / den;
  };
  std::size_t best = 0;
  double best_v = -2;
  for (std::size_t lag = 72; lag <= 216; ++lag) {
    if (acf(lag) > best_v) {
      best_v = acf(lag);
      best = lag;
    }
  }
  CHECK(best >= 137);
  CHECK(best <= 151);

  WindowingConfig w;
  const auto ds = windowize(s, w);
  CHECK(ds.missing_classes().empty());

  ChpConfig summer = cfg;
  summer.season = Season::summer;
  summer.days = 5;
  Rng r2(1);
  for (double v : generate_chp_like(summer, r2).channel("P_CHP")) CHECK(v == 0.0);
}

TEST_CASE("windowing arithmetic") {
  CHECK(block_mean(std::vector<double>{1, 2, 3, 4, 5}, 2) == std::vector<double>{1.5, 3.5});
  CHECK(power_level(0.0, 50, 5) == 0);
  CHECK(power_level(9.99, 50, 5) == 0);
  CHECK(power_level(10.0, 50, 5) == 1);
  CHECK(power_level(50.0, 50, 5) == 4);
  CHECK(power_level(-1.0, 50, 5) == 0);
  CHECK(window_count(100, 36, 1) == 65);
  CHECK(window_count(100, 36, 8) == 9);

  Series s;
  for (int i = 0; i < 400; ++i) s.timestamps.push_back(i * 60);
  s.channel_names = {"P_tot", "T_water", "T_amb", "P_CHP"};
  s.columns.assign(4, std::vector<double>(400, 1.0));
  for (int i = 0; i < 400; ++i) s.columns[3][i] = i < 200 ? 0.0 : 45.0;
  const auto ds = windowize(s, WindowingConfig{});
  CHECK(ds.size() == 40 - 36 + 1);
  CHECK(ds.channels == 3);
  CHECK(ds.length == 36);
  // first window covers resampled steps 0..35, half of them on
  CHECK(ds.labels[0] == power_level(45.0 * 16 / 36, 50, 5));
  Series tiny = s;
  for (auto& c : tiny.columns) c.resize(100);
  tiny.timestamps.resize(100);
  CHECK_THROWS(windowize(tiny, WindowingConfig{}));
}

TEST_CASE("series csv and timestamps") {
  CHECK(format_iso8601(1598918400) == "2020-09-01T00:00:00");
  CHECK(parse_iso8601("2020-09-01T00:00:00") == 1598918400);
  CHECK(parse_iso8601("2020-09-01 00:01Z") == 1598918460);
  Series s;
  s.timestamps = {0, 60};
  s.channel_names = {"a", "b"};
  s.columns = {{1.5, 2.5}, {-1, 0}};
  const auto p = temp_file("srea_test_series.csv");
  write_series_csv(p, s);
  const auto back = read_series_csv(p);
  fs::remove(p);
  CHECK(back.timestamps == s.timestamps);
  CHECK(back.channel("b") == s.columns[1]);
  CHECK_THROWS_AS(back.channel_index("zz"), std::out_of_range);
}
