#include <cmath>
#include <numeric>

#include "doctest.h"
#include "srea/algo/kmeans.hpp"
#include "srea/algo/losses.hpp"
#include "srea/algo/relabel.hpp"
#include "srea/algo/schedule.hpp"
#include "srea/algo/trainer.hpp"
#include "srea/data/normalize.hpp"
#include "srea/data/synthetic.hpp"
#include "srea/noise/transition.hpp"

using namespace srea;
using namespace srea::algo;
using core::Rng;
using core::TensorD;

TEST_CASE("schedule ramps") {
  const ScheduleParams s{0, 25, 30};
  CHECK(alpha_at(0, s) == 0.0);
  CHECK(alpha_at(10, s) == 10.0 / 25.0);
  CHECK(alpha_at(25, s) == 1.0);
  CHECK(alpha_at(90, s) == 1.0);
  CHECK(w_at(25, s) == 0.0);
  CHECK(w_at(40, s) == 15.0 / 30.0);
  CHECK(w_at(55, s) == 1.0);

  const ScheduleParams z{5, 0, 0};
  CHECK(alpha_at(4, z) == 0.0);
  CHECK(alpha_at(5, z) == 1.0);
  CHECK(w_at(5, z) == 1.0);
  CHECK_THROWS(alpha_at(-1, s));
  CHECK_THROWS(ScheduleParams{0, 25, 30}.validate(50));
  CHECK_NOTHROW(ScheduleParams{0, 25, 30}.validate(55));
  CHECK_THROWS(ScheduleParams{-1, 1, 1}.validate(10));
}

TEST_CASE("alpha and w are monotone and bounded") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ScheduleParams s{static_cast<int>(rng.uniform_int(0, 10)),
                           static_cast<int>(rng.uniform_int(0, 20)),
                           static_cast<int>(rng.uniform_int(0, 20))};
    double pa = 0, pw = 0;
    for (int t = 0; t < 60; ++t) {
      const double a = alpha_at(t, s), w = w_at(t, s);
      CHECK(a >= pa);
      CHECK(w >= pw);
      CHECK(a <= 1.0);
      CHECK(w <= 1.0);
      if (w > 0.0) CHECK(a == 1.0);
      pa = a;
      pw = w;
    }
  }
}

TEST_CASE("loss values against hand computation") {
  const auto x = TensorD::from({1, 1, 2}, {1, 2});
  const auto xh = TensorD::from({1, 1, 2}, {0, 4});
  CHECK(reconstruction_loss(xh, x).item() == doctest::Approx(2.5));

  const auto probs = TensorD::from({2, 2}, {0.25, 0.75, 0.5, 0.5});
  const std::vector<int> y{1, 0};
  CHECK(classification_loss(probs, y).item() ==
        doctest::Approx(-(std::log(0.75) + std::log(0.5)) / 2));

  // Uniform batch mean: KL is zero.
  CHECK(prior_regularization_loss(TensorD::from({2, 2}, {0.2, 0.8, 0.8, 0.2})).item() ==
        doctest::Approx(0.0).scale(1));
  const double kl = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  CHECK(prior_regularization_loss(TensorD::from({1, 2}, {0.9, 0.1})).item() == doctest::Approx(kl));

  // One embedding at the origin, centers at (1,0) and (0,3) in [d x k].
  const auto e = TensorD::from({1, 2}, {0, 0});
  const auto C = TensorD::from({2, 2}, {1, 0, 0, 3});
  ClusteringTerms terms;
  const std::vector<int> lab{0};
  const double v = clustering_loss(e, lab, C, &terms).item();
  const double intra = 1.0;
  const double inter = std::log(std::exp(-1.0) + std::exp(-3.0));
  const double reg = -2.0 * std::log(std::sqrt(10.0));
  CHECK(terms.intra == doctest::Approx(intra));
  CHECK(terms.inter == doctest::Approx(inter));
  CHECK(terms.regularizer == doctest::Approx(reg));
  CHECK(v == doctest::Approx(intra + inter + reg));

  LossParts parts{1, 2, 3, 4};
  CHECK(total_loss(parts, 0.5, {}) == doctest::Approx(1 + 0.5 * 9));
  CHECK(total_loss(parts, 0.5, {false, false, true}) == doctest::Approx(0.5 * 6));
}

TEST_CASE("coincident centers do not produce NaN") {
  const auto e = TensorD::from({2, 2}, {0, 0, 1, 1}, true);
  const auto C = TensorD::from({2, 2}, {0, 0, 0, 0}, true);
  ClusteringTerms terms;
  const std::vector<int> lab{0, 1};
  const auto loss = clustering_loss(e, lab, C, &terms);
  core::backward(loss);
  CHECK(std::isfinite(loss.item()));
  CHECK(terms.collapsed > 0);
  for (double g : C.grad()) CHECK(std::isfinite(g));
}

TEST_CASE("ema weights") {
  const auto w5 = ema_weights(5);
  double s = 0;
  for (double w : w5) s += w;
  CHECK(s == doctest::Approx(1.0));
  for (std::size_t j = 1; j < 5; ++j) CHECK(w5[j] / w5[j - 1] == doctest::Approx(std::exp(0.5)));
  const auto w1 = ema_weights(1);
  CHECK(w1.size() == 1);
  CHECK(w1[0] == doctest::Approx(1.0));

  EmaBuffer buf(1, 2);
  for (int e = 0; e < 7; ++e) {
    const float p = e < 2 ? 1.0f : 0.0f;  // first two epochs evicted later
    std::vector<float> probs{p, 1.0f - p};
    buf.push(0, probs);
  }
  CHECK(buf.stored(0) == 5);
  CHECK(buf.pseudo_label(0)[1] == doctest::Approx(1.0));

  std::vector<std::vector<double>> hist{{1, 0}, {0, 1}};
  const auto y = classifier_pseudo_label(hist);
  const auto w2 = ema_weights(2);
  CHECK(y[0] == doctest::Approx(w2[0]));
  CHECK(y[1] == doctest::Approx(w2[1]));
}

TEST_CASE("cluster pseudo-label is a softmin over distances") {
  const std::vector<float> e{0, 0};
  const std::vector<float> C{1, 0, 0, 3};  // [d x k], centers (1,0) and (0,3)
  const auto y = cluster_pseudo_label(e, C, 2);
  const double z = std::exp(-1.0) + std::exp(-3.0);
  CHECK(y[0] == doctest::Approx(std::exp(-1.0) / z));
  CHECK(y[1] == doctest::Approx(std::exp(-3.0) / z));
}

TEST_CASE("label correction") {
  const std::vector<double> yc{0.1, 0.8, 0.1};
  const std::vector<double> ycc{0.2, 0.7, 0.1};
  CHECK(correct_label(0, yc, ycc, 0.0) == 0);
  CHECK(correct_label(0, yc, ycc, 1.0) == 1);
  // class 0 scores 1 - 0.7 w, class 1 scores 1.5 w: the switch is at w = 1 / 2.2
  CHECK(correct_label(0, yc, ycc, 0.45) == 0);
  CHECK(correct_label(0, yc, ycc, 0.46) == 1);
  CHECK(correct_label(0, yc, {}, 0.5) == 0);
  CHECK(correct_label(0, yc, {}, 0.6) == 1);
  // tie between given class and another: keep the given label
  const std::vector<double> half{0.5, 0.5};
  CHECK(correct_label(1, half, {}, 1.0) == 1);
  CHECK(correct_label(0, half, {}, 1.0) == 0);
  // halving the pseudo-sum changes the balance point
  CHECK(correct_label(0, yc, ycc, 0.5, false) == 1);
  CHECK(correct_label(0, yc, ycc, 0.5, true) == 0);
}

TEST_CASE("k-means separates well-spaced blobs") {
  Rng rng(12);
  const std::size_t n = 300, d = 2;
  std::vector<float> pts;
  std::vector<int> truth;
  const double cx[3] = {0, 10, 0}, cy[3] = {0, 0, 10};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    pts.push_back(static_cast<float>(cx[c] + rng.normal(0, 0.5)));
    pts.push_back(static_cast<float>(cy[c] + rng.normal(0, 0.5)));
    truth.push_back(c);
  }
  Rng km(1);
  const auto r = kmeans(pts, n, d, 3, km);
  CHECK(r.converged);
  const auto match = match_clusters(r.assignment, truth, 3);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) agree += match[r.assignment[i]] == truth[i] ? 1 : 0;
  CHECK(agree == n);

  Rng km2(1);
  const auto centers = init_cluster_centers(pts, n, d, truth, 3, km2);
  for (int c = 0; c < 3; ++c) {
    CHECK(centers[c * d] == doctest::Approx(cx[c]).epsilon(0.2).scale(1));
    CHECK(centers[c * d + 1] == doctest::Approx(cy[c]).epsilon(0.2).scale(1));
  }
}

TEST_CASE("k-means degenerate input") {
  std::vector<float> same(10, 1.0f);
  Rng rng(0);
  const auto r = kmeans(same, 10, 1, 3, rng);
  for (int a : r.assignment) CHECK(a >= 0);
  const std::vector<int> assign{0, 0, 1, 1};
  const std::vector<int> labels{1, 1, 0, 0};
  const auto m = match_clusters(assign, labels, 3);
  CHECK(m[0] == 1);
  CHECK(m[1] == 0);
  CHECK(m[2] == -1);
}

namespace {

nn::Architecture tiny_arch() {
  nn::Architecture a;
  a.encoder_channels = {8, 8, 8, 8};
  a.embedding_dim = 4;
  a.classifier_hidden = 8;
  return a;
}

}  // namespace

TEST_CASE("trainer runs the three phases deterministically") {
  Rng g(2);
  auto ds = data::generate_cbf(60, 32, g);
  data::znormalize(ds);
  Rng nr(3);
  const auto c = noise::corrupt(ds.labels, noise::build_symmetric(3, 0.3), nr);
  ds.labels = c.labels;

  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.schedule = {1, 2, 2};
  auto run = [&]() {
    nn::SreaModel m(1, 32, 3, tiny_arch(), Rng(1));
    Rng rng(5);
    return train(ds, m, cfg, rng, &c.oracle);
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.trace.size() == 6);
  CHECK(a.trace[0].alpha == 0.0);
  CHECK(a.trace[0].relabel_fraction == 0.0);
  CHECK(a.trace[5].w == 1.0);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(to_json(a.trace[i]) == to_json(b.trace[i]));
  }
  CHECK(a.corrected_labels == b.corrected_labels);
  REQUIRE(a.corrected_label_accuracy.has_value());
  CHECK(*a.corrected_label_accuracy >= 0.0);
  CHECK(*a.corrected_label_accuracy <= 1.0);
}

TEST_CASE("cross-entropy baseline keeps the given labels") {
  Rng g(2);
  auto ds = data::generate_cbf(40, 32, g);
  data::znormalize(ds);
  nn::SreaModel m(1, 32, 3, tiny_arch(), Rng(1));
  Rng rng(5);
  const auto r = train(ds, m, cross_entropy_config(3), rng);
  CHECK(r.corrected_labels == ds.labels);
  for (const auto& t : r.trace) {
    CHECK(t.alpha == 1.0);
    CHECK(t.w == 0.0);
    CHECK(t.loss_ae == 0.0);
  }
  CHECK(predict(m, ds).size() == ds.size());
  CHECK(embed(m, ds, nn::Phase::eval).size() == ds.size() * 4);
}
