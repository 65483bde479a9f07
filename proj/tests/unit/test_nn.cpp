#include <filesystem>
#include <set>

#include "doctest.h"
#include "srea/core/ops.hpp"
#include "srea/nn/adam.hpp"
#include "srea/nn/checkpoint.hpp"
#include "srea/nn/model.hpp"
#include "srea/nn/regime.hpp"

using namespace srea;
using core::Rng;
using core::TensorF;

namespace {

nn::Architecture small_arch() {
  nn::Architecture a;
  a.encoder_channels = {4, 4, 8, 8};
  a.embedding_dim = 5;
  a.classifier_hidden = 6;
  return a;
}

TensorF random_batch(std::size_t b, std::size_t c, std::size_t l, Rng& rng) {
  std::vector<float> v(b * c * l);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return TensorF::from({b, c, l}, v);
}

}  // namespace

TEST_CASE("model shapes follow the layer table") {
  for (std::size_t len : {16u, 36u, 37u, 128u, 130u}) {
    nn::SreaModel m(3, len, 5, small_arch(), Rng(1));
    Rng drop(2);
    auto x = random_batch(4, 3, len, drop);
    const auto out = m.forward(x, nn::Phase::train, drop);
    CHECK(out.embedding.shape() == core::Shape{4, 5});
    CHECK(out.reconstruction.shape() == core::Shape{4, 3, len});
    CHECK(out.logits.shape() == core::Shape{4, 5});
    CHECK(m.centers().shape() == core::Shape{5, 5});
  }
  CHECK_THROWS_AS(nn::SreaModel(1, 15, 3, small_arch(), Rng(1)), nn::ArchitectureError);
  CHECK_THROWS_AS(nn::SreaModel(1, 32, 1, small_arch(), Rng(1)), nn::ArchitectureError);
}

TEST_CASE("default architecture parameter names are unique") {
  auto m = nn::build_model(1, 128, 3);
  std::set<std::string> names;
  for (const auto& p : m.parameters()) names.insert(p.name);
  CHECK(names.size() == m.parameters().size());
  CHECK(m.embedding_dim() == 32);
  CHECK(m.parameter_count() > 100000);
}

TEST_CASE("same seed gives the same initialization") {
  nn::SreaModel a(1, 32, 3, small_arch(), Rng(7));
  nn::SreaModel b(1, 32, 3, small_arch(), Rng(7));
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(std::equal(pa[i].tensor.values().begin(), pa[i].tensor.values().end(),
                     pb[i].tensor.values().begin()));
  }
}

TEST_CASE("set_centers places center j in column j") {
  nn::SreaModel m(1, 16, 3, small_arch(), Rng(1));
  std::vector<float> rows(3 * 5);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t a = 0; a < 5; ++a) rows[j * 5 + a] = static_cast<float>(10 * j + a);
  }
  m.set_centers(rows);
  CHECK(m.centers().at(2 * 3 + 1) == doctest::Approx(12.0f));
  CHECK(m.centers().at(0 * 3 + 2) == doctest::Approx(20.0f));
}

TEST_CASE("learning rate and batch size regime") {
  CHECK(nn::lr_at(0) == doctest::Approx(0.01));
  CHECK(nn::lr_at(19) == doctest::Approx(0.01));
  CHECK(nn::lr_at(20) == doctest::Approx(0.005));
  CHECK(nn::lr_at(45) == doctest::Approx(0.0025));
  CHECK(nn::batch_size_for(744) == 74);
  CHECK(nn::batch_size_for(5000) == 128);
  CHECK(nn::batch_size_for(5) == 1);
}

TEST_CASE("adam first step moves each weight by about lr") {
  auto p = TensorF::from({3}, {1.0f, -2.0f, 0.5f}, true);
  nn::AdamConfig cfg;
  cfg.weight_decay = 0.0;
  nn::Adam opt({p}, cfg);
  auto g = p.mutable_grad();
  g[0] = 0.3f;
  g[1] = -4.0f;
  g[2] = 0.0f;
  opt.step(0.1);
  CHECK(p.at(0) == doctest::Approx(0.9f).epsilon(1e-4));
  CHECK(p.at(1) == doctest::Approx(-1.9f).epsilon(1e-4));
  CHECK(p.at(2) == doctest::Approx(0.5f));
}

TEST_CASE("adam decoupled decay and skipped parameters") {
  auto p = TensorF::from({1}, {2.0f}, true);
  auto idle = TensorF::from({1}, {3.0f}, true);
  nn::AdamConfig cfg;
  cfg.weight_decay = 0.1;
  nn::Adam opt({p, idle}, cfg);
  p.mutable_grad()[0] = 0.0f;
  opt.step(0.5);
  // zero gradient: only the decay term acts, p <- p - lr * wd * p
  CHECK(p.at(0) == doctest::Approx(2.0f * (1.0f - 0.05f)));
  CHECK(idle.at(0) == 3.0f);
  CHECK(opt.param_step_count(1) == 0);
  opt.zero_grad();
  CHECK_FALSE(p.has_grad());
}

TEST_CASE("adam minimizes a quadratic") {
  auto p = TensorF::from({2}, {3.0f, -1.0f}, true);
  nn::Adam opt({p}, nn::AdamConfig{0.9, 0.999, 1e-8, 0.0, true});
  for (int i = 0; i < 500; ++i) {
    opt.zero_grad();
    core::backward(core::sum(core::square(p)));
    opt.step(0.05);
  }
  CHECK(std::abs(p.at(0)) < 1e-2);
  CHECK(std::abs(p.at(1)) < 1e-2);
}

TEST_CASE("checkpoint round trip is bit exact") {
  nn::SreaModel m(2, 20, 4, small_arch(), Rng(3));
  Rng drop(1);
  auto x = random_batch(3, 2, 20, drop);
  m.forward(x, nn::Phase::train, drop);  // moves running statistics
  const auto path = std::filesystem::temp_directory_path() / "srea_test_ckpt.bin";
  nn::save_checkpoint(path, m, {{"norm.mean", core::Shape{2}, {1.0f, 2.0f}}});
  auto loaded = nn::load_checkpoint(path);
  std::filesystem::remove(path);
  const auto pa = m.parameters();
  const auto pb = loaded.model.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].name == pb[i].name);
    CHECK(std::equal(pa[i].tensor.values().begin(), pa[i].tensor.values().end(),
                     pb[i].tensor.values().begin()));
  }
  Rng d1(0), d2(0);
  const auto ya = m.forward(x, nn::Phase::eval, d1).logits;
  const auto yb = loaded.model.forward(x, nn::Phase::eval, d2).logits;
  for (std::size_t i = 0; i < ya.size(); ++i) CHECK(ya.at(i) == yb.at(i));
  CHECK(core::find_record(loaded.records, "norm.mean").values[1] == 2.0f);
}
