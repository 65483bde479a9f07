#include <cmath>
#include <set>

#include "doctest.h"
#include "srea/core/rng.hpp"
#include "srea/eval/critical_difference.hpp"
#include "srea/eval/friedman.hpp"
#include "srea/eval/mann_whitney.hpp"
#include "srea/eval/metrics.hpp"
#include "stats_oracle.hpp"

using namespace srea::eval;
using srea::core::Rng;

TEST_CASE("macro F1") {
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> pred{0, 1, 1, 1};
  const auto r = f1_report(pred, truth, 2);
  CHECK(r.per_class[0] == doctest::Approx(2.0 / 3.0));
  CHECK(r.per_class[1] == doctest::Approx(0.8));
  CHECK(r.macro == doctest::Approx(0.7333333));
  CHECK(macro_f1(truth, truth, 2) == 1.0);

  std::vector<int> t5, p5;
  for (int i = 0; i < 50; ++i) {
    t5.push_back(i % 5);
    p5.push_back(2);
  }
  // class 2: precision 1/5, recall 1 -> F1 = 1/3
  CHECK(macro_f1(p5, t5, 5) == doctest::Approx(1.0 / 15.0));

  const auto empty = f1_report(std::vector<int>{0, 0}, std::vector<int>{0, 0}, 3);
  CHECK(empty.empty_classes == std::vector<int>{1, 2});
  CHECK_FALSE(empty.warnings.empty());
}

TEST_CASE("macro F1 is invariant under consistent relabeling") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> t(40), p(40);
    for (auto& v : t) v = static_cast<int>(rng.uniform_index(4));
    for (auto& v : p) v = static_cast<int>(rng.uniform_index(4));
    std::vector<int> perm{0, 1, 2, 3};
    rng.shuffle(std::span<int>(perm));
    std::vector<int> t2, p2;
    for (int v : t) t2.push_back(perm[v]);
    for (int v : p) p2.push_back(perm[v]);
    const double f = macro_f1(p, t, 4);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(macro_f1(p2, t2, 4) == doctest::Approx(f));
  }
}

TEST_CASE("confusion matrix") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{0, 1, 1, 1, 0, 2};
  const auto cm = confusion_matrix(pred, truth, 3);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.at(2, 0) == 1);
  CHECK(cm.at(2, 2) == 1);
  std::size_t total = 0;
  for (auto c : cm.counts) total += c;
  CHECK(total == 6);
  CHECK(cm.row_percentages()[0] == doctest::Approx(50.0));
  CHECK(cm.to_csv().rfind("truth,pred0,pred1,pred2\n", 0) == 0);
  CHECK(accuracy(pred, truth) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("mann-whitney worked examples") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = mann_whitney_u(a, b);
  CHECK(r.u_a == 0.0);
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(0.1));
  CHECK(r.verdict == Verdict::similar);
  CHECK(to_string(r.verdict) == "≈");

  const auto same = mann_whitney_u(a, a);
  CHECK(same.p == doctest::Approx(1.0));
  CHECK(same.verdict == Verdict::similar);

  std::vector<double> lo, hi;
  for (int i = 0; i < 10; ++i) {
    lo.push_back(i);
    hi.push_back(100 + i);
  }
  CHECK(mann_whitney_u(lo, hi).verdict == Verdict::worse);
  CHECK(mann_whitney_u(hi, lo).verdict == Verdict::better);
  CHECK(mann_whitney_u(hi, lo, 0.05, Alternative::less).verdict == Verdict::similar);
  CHECK_THROWS(mann_whitney_u(std::vector<double>{1, 2}, b));
}

TEST_CASE("exact p-values against full enumeration") {
  Rng rng(17);
  for (std::size_t na = 3; na <= 6; ++na) {
    for (std::size_t nb = 3; nb <= 6; ++nb) {
      std::vector<double> a(na), b(nb);
      for (auto& v : a) v = rng.uniform();
      for (auto& v : b) v = rng.uniform() + 0.3;
      const auto r = mann_whitney_u(a, b, 0.05, Alternative::two_sided, MwuMethod::exact);
      CHECK(r.p == doctest::Approx(srea::testing::enumerated_mwu_p(a, b)).epsilon(1e-12));
    }
  }
  const auto dist = mann_whitney_null_distribution(4, 5);
  double s = 0;
  for (double p : dist) s += p;
  CHECK(dist.size() == 21);
  CHECK(s == doctest::Approx(1.0));
  CHECK(dist[0] == doctest::Approx(1.0 / 126.0));
}

TEST_CASE("U complementarity and exact/normal agreement") {
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(8), b(8);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal(0.5, 1.0);
    const auto ab = mann_whitney_u(a, b);
    const auto ba = mann_whitney_u(b, a);
    CHECK(ab.u_a + ba.u_a == doctest::Approx(64.0));
    const auto ex = mann_whitney_u(a, b, 0.05, Alternative::two_sided, MwuMethod::exact);
    const auto nm = mann_whitney_u(a, b, 0.05, Alternative::two_sided, MwuMethod::normal);
    worst = std::max(worst, std::fabs(ex.p - nm.p));
  }
  CHECK(worst < 0.02);
}

TEST_CASE("ties use midranks and the normal path") {
  CHECK(midranks(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
  const std::vector<double> a{1, 1, 2, 2}, b{2, 3, 3, 3};
  const auto r = mann_whitney_u(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.u_a == doctest::Approx(1.0));  // ranks 1.5, 1.5, 4, 4 minus 4 * 5 / 2
  const std::vector<double> flat{1, 1, 1};
  CHECK(mann_whitney_u(flat, flat).p == 1.0);
}

TEST_CASE("friedman worked example") {
  const auto m = srea::testing::worked_example();
  const auto r = friedman_test(m);
  CHECK(r.mean_ranks[0] == doctest::Approx(1.25));
  CHECK(r.mean_ranks[1] == doctest::Approx(2.0));
  CHECK(r.mean_ranks[2] == doctest::Approx(2.75));
  CHECK(r.chi2 == doctest::Approx(srea::testing::kWorkedChi2));
  CHECK(r.f_stat == doctest::Approx(srea::testing::kWorkedF));
  CHECK(r.p_chi2 == doctest::Approx(std::exp(-2.25)));
  CHECK_FALSE(r.warnings.empty());  // fewer than 5 conditions
}

TEST_CASE("friedman properties") {
  srea::eval::ScoreMatrix flat{{"a", "b", "c"}, {"x", "y"}, {{1, 1}, {1, 1}, {1, 1}}};
  const auto r = friedman_test(flat);
  CHECK(r.chi2 == doctest::Approx(0.0).scale(1));
  CHECK(r.p_chi2 == doctest::Approx(1.0));
  for (double v : r.mean_ranks) CHECK(v == doctest::Approx(2.0));

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    srea::eval::ScoreMatrix m;
    const std::size_t k = 3 + rng.uniform_index(4), n = 2 + rng.uniform_index(8);
    for (std::size_t i = 0; i < k; ++i) m.algorithms.push_back("a" + std::to_string(i));
    for (std::size_t c = 0; c < n; ++c) m.conditions.push_back("c" + std::to_string(c));
    m.scores.assign(k, std::vector<double>(n));
    for (auto& row : m.scores) {
      for (auto& v : row) v = std::round(rng.uniform() * 4) / 4;  // plenty of ties
    }
    for (std::size_t c = 0; c < n; ++c) m.scores[0][c] = 2.0;  // dominant
    const auto res = friedman_test(m);
    const auto oracle = srea::testing::brute_force_mean_ranks(m);
    double total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(res.mean_ranks[i] == doctest::Approx(oracle[i]));
      total += res.mean_ranks[i];
    }
    CHECK(res.mean_ranks[0] == 1.0);
    CHECK(total == doctest::Approx(static_cast<double>(k * (k + 1)) / 2.0));
  }
  CHECK_THROWS(friedman_test(srea::eval::ScoreMatrix{{"a", "b"}, {"x", "y"}, {{1, 2}, {2, 1}}}));
}

TEST_CASE("nemenyi critical difference") {
  CHECK(nemenyi_cd(6, 10, 0.05) == doctest::Approx(2.384).epsilon(1e-3 / 2.384));
  CHECK(nemenyi_cd(2, 9, 0.05) == doctest::Approx(nemenyi_q(2, 0.05) / 3.0));
  CHECK(nemenyi_q(2, 0.05) == doctest::Approx(1.960).epsilon(1e-4));
  double prev = 1e9;
  for (std::size_t n = 2; n < 200; n += 7) {
    const double cd = nemenyi_cd(5, n);
    CHECK(cd < prev);
    prev = cd;
  }
  CHECK(nemenyi_cd(5, 1000000) < 0.01);
  CHECK_THROWS(nemenyi_q(21, 0.05));
  CHECK_THROWS(nemenyi_q(5, 0.01));
}

TEST_CASE("critical difference layout") {
  const auto one = cd_diagram_layout({"a", "b", "c"}, {1.0, 1.5, 2.0}, 1.5);
  REQUIRE(one.cliques.size() == 1);
  CHECK(one.cliques[0].size() == 3);
  CHECK(cd_diagram_layout({"a", "b"}, {1.0, 5.0}, 1.0).cliques.empty());

  // brute force: the cliques are exactly the maximal contiguous runs in which
  // every pair is within cd
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> names;
    std::vector<double> ranks;
    for (int i = 0; i < 6; ++i) {
      names.push_back("alg" + std::to_string(i));
      ranks.push_back(1.0 + rng.uniform() * 5.0);
    }
    const double cd = 0.5 + rng.uniform() * 2.0;
    const auto layout = cd_diagram_layout(names, ranks, cd);
    for (std::size_t e = 1; e < layout.entries.size(); ++e) {
      CHECK(layout.entries[e - 1].rank <= layout.entries[e].rank);
    }
    std::set<std::pair<std::size_t, std::size_t>> expected;
    const auto& en = layout.entries;
    for (std::size_t i = 0; i < en.size(); ++i) {
      std::size_t j = i;
      while (j + 1 < en.size() && en[j + 1].rank - en[i].rank <= cd) ++j;
      const bool extends_left = i > 0 && en[j].rank - en[i - 1].rank <= cd;
      if (j > i && !extends_left) expected.insert({i, j});
    }
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& c : layout.cliques) got.insert({c.front(), c.back()});
    CHECK(got == expected);
  }
  const auto svg = one.to_svg();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(one.to_json().find("\"cd\"") != std::string::npos);
  const auto esc = cd_diagram_layout({"a<b", "c"}, {1.0, 2.0}, 0.5).to_svg();
  CHECK(esc.find("a&lt;b") != std::string::npos);
}
