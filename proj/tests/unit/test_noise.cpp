#include <filesystem>

#include "doctest.h"
#include "srea/noise/transition.hpp"

using namespace srea::noise;
using srea::core::Rng;

TEST_CASE("builders are row-stochastic with the documented shape") {
  for (std::size_t k = 2; k <= 8; ++k) {
    for (double eps : {0.0, 0.3, 0.9}) {
      for (auto kind : {NoiseKind::symmetric, NoiseKind::asymmetric, NoiseKind::flip}) {
        const auto T = build_transition(kind, k, eps);
        for (std::size_t i = 0; i < k; ++i) {
          double s = 0;
          for (std::size_t j = 0; j < k; ++j) {
            CHECK(T(i, j) >= 0.0);
            s += T(i, j);
          }
          CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
  const auto a = build_asymmetric(4, 0.2);
  CHECK(a(3, 0) == doctest::Approx(0.2));
  CHECK(a(1, 2) == doctest::Approx(0.2));
  CHECK(a(1, 1) == doctest::Approx(0.8));
  const auto f = build_flip(5, 0.3);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(3, 0) == doctest::Approx(0.3));
  CHECK(f(3, 3) == doctest::Approx(0.7));
  const auto s = build_symmetric(3, 0.3);
  CHECK(s(0, 2) == doctest::Approx(0.15));
}

TEST_CASE("builder arguments are validated") {
  CHECK_THROWS_AS(build_symmetric(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_flip(3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(build_asymmetric(3, -0.1), std::invalid_argument);
  CHECK(parse_noise_kind("pair") == NoiseKind::flip);
  CHECK_THROWS(parse_noise_kind("gaussian"));
}

TEST_CASE("zero noise is the identity and corruption is reproducible") {
  std::vector<int> labels;
  for (int i = 0; i < 500; ++i) labels.push_back(i % 5);
  Rng r(1);
  const auto c0 = corrupt(labels, build_symmetric(5, 0.0), r);
  CHECK(c0.labels == labels);
  CHECK(c0.oracle.corrupted_count() == 0);

  Rng a(9), b(9);
  const auto ca = corrupt(labels, build_symmetric(5, 0.4), a);
  const auto cb = corrupt(labels, build_symmetric(5, 0.4), b);
  CHECK(ca.labels == cb.labels);
}

TEST_CASE("flip noise never touches class 0") {
  std::vector<int> labels;
  for (int i = 0; i < 5000; ++i) labels.push_back(i % 5);
  Rng r(4);
  const auto c = corrupt(labels, build_flip(5, 0.3), r);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) CHECK(c.labels[i] == 0);
    if (c.labels[i] != labels[i]) CHECK(c.labels[i] == 0);
  }
}

TEST_CASE("oracle statistics and persistence") {
  const std::vector<int> clean{0, 1, 2, 0, 1};
  const std::vector<int> given{0, 2, 2, 1, 1};
  const auto o = make_oracle(clean, given);
  CHECK(o.corrupted_count() == 2);
  CHECK(o.agreement(given) == doctest::Approx(0.6));
  CHECK(o.restored_fraction(given) == doctest::Approx(0.0));
  CHECK(o.restored_fraction(clean) == doctest::Approx(1.0));
  const std::vector<int> half{0, 1, 2, 1, 1};
  CHECK(o.restored_fraction(half) == doctest::Approx(0.5));
  CHECK(o.correctness(half) == std::vector<int>{1, 1, 1, 0, 1});
  const auto cm = o.confusion(given, 3);
  CHECK(cm[0 * 3 + 1] == 1);
  CHECK(cm[1 * 3 + 2] == 1);
  CHECK_THROWS_AS(o.agreement(std::vector<int>{0}), std::invalid_argument);

  const std::vector<std::size_t> idx{1, 3};
  CHECK(o.subset(idx).corrupted_count() == 2);

  const auto path = std::filesystem::temp_directory_path() / "srea_test_oracle.bin";
  o.save(path);
  const auto back = CleanLabelOracle::load(path);
  std::filesystem::remove(path);
  CHECK(back.agreement(given) == doctest::Approx(0.6));
  CHECK(back.corrupted_count() == 2);
}
