#include <catch_amalgamated.hpp>

#include <cmath>

#include "cwavegan/errors.hpp"
#include "cwavegan/model.hpp"
#include "support/oracles.hpp"
#include "support/tables.hpp"

using namespace cwavegan;

namespace {

ModelConfig small(Conditioning c, std::size_t d = 4) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.length = 1024;
  cfg.strides = {4, 4, 4};
  cfg.num_classes = 3;
  cfg.z_dim = 8;
  cfg.conditioning = c;
  return cfg;
}

float linf(const Tensor<float>& a, const Tensor<float>& b) {
  float m = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("config validation") {
  ModelConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.length = 8000;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ModelConfig{};
  cfg.d = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ModelConfig{};
  cfg.num_classes = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ModelConfig{};
  cfg.z_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  Rng rng(1);
  cfg = ModelConfig{};
  cfg.strides = {4, 4};
  CHECK_THROWS_AS(build_generator<float>(cfg, rng), ConfigError);
}

TEST_CASE("layer shapes follow the architecture tables") {
  for (std::size_t d : {1u, 4u, 64u}) {
    CAPTURE(d);
    ModelConfig cfg;
    cfg.d = d;
    cfg.conditioning = Conditioning::none;
    Rng rng(2);
    const auto gen = build_generator<float>(cfg, rng);
    const auto disc = build_discriminator<float>(cfg, rng);
    const std::size_t n = 1;
    Graph<float> g(false);
    LayerTrace gt, dt;
    const Tensor<float> z = sample_uniform<float>({n, 100}, rng);
    const std::vector<int> labels = {0};
    const Tensor<float> x = generator_forward(g, gen, z, labels, cfg, &gt);
    Rng shuffle(3);
    discriminator_forward(g, disc, x, labels, cfg, &shuffle, &dt);
    CHECK(tables::same(gt, tables::generator(n, d, 1)));
    CHECK(tables::same(dt, tables::discriminator(n, d, 1)));

    CHECK(gen.dense_w.shape() == Shape{100, 256 * d});
    CHECK(gen.conv_w.back().shape() == Shape{25, d, 1});
    CHECK(disc.conv_w.front().shape() == Shape{25, 1, d});
    CHECK(disc.dense_w.shape() == Shape{256 * d, 1});
  }
}

TEST_CASE("concat conditioning widens the generator input and discriminator channels") {
  ModelConfig cfg;
  cfg.d = 1;
  Rng rng(4);
  const auto gen = build_generator<float>(cfg, rng);
  const auto disc = build_discriminator<float>(cfg, rng);
  CHECK(gen.dense_w.shape() == Shape{110, 256});
  CHECK(disc.conv_w.front().shape() == Shape{25, 11, 1});
  Graph<float> g(false);
  LayerTrace trace;
  const std::vector<int> labels = {3, 9};
  discriminator_forward(g, disc, Tensor<float>({2, 8192, 1}), labels, cfg, nullptr, &trace);
  REQUIRE(trace.size() > 1);
  CHECK(trace[1].name == "concat_label");
  CHECK(trace[1].shape == Shape{2, 8192, 11});
}

TEST_CASE("parameter count matches the independent shape walk") {
  // Frozen from tests/support/param_count.py 64 1.
  ModelConfig cfg;
  cfg.conditioning = Conditioning::none;
  Rng rng(5);
  CHECK(parameter_count(build_generator<float>(cfg, rng).named_parameters()) == 19065345);
  CHECK(parameter_count(build_discriminator<float>(cfg, rng).named_parameters()) == 17427969);
}

TEST_CASE("initialization is fan-in scaled uniform with zero biases") {
  ModelConfig cfg = small(Conditioning::scale, 8);
  Rng rng(6);
  const auto gen = build_generator<float>(cfg, rng);
  const auto disc = build_discriminator<float>(cfg, rng);
  auto check_uniform = [](const Tensor<float>& w, double fan_in) {
    const double bound = std::sqrt(6.0 / fan_in);
    double sq = 0;
    for (float v : w.values()) {
      CHECK(std::abs(v) <= bound);
      sq += static_cast<double>(v) * v;
    }
    // Variance of U(-b, b) is b^2 / 3.
    const double var = sq / static_cast<double>(w.numel());
    CHECK(var == Catch::Approx(bound * bound / 3).epsilon(0.15));
  };
  check_uniform(gen.dense_w, 8.0);
  check_uniform(disc.conv_w[1], 25.0 * 8);
  // Transposed conv: each output sample sees ceil(25 / stride) taps per input channel.
  check_uniform(gen.conv_w[0], 7.0 * 32);
  for (const auto& [name, t] : gen.named_parameters()) {
    if (name.ends_with(".b")) {
      for (float v : t.values()) CHECK(v == 0.0f);
    }
    if (name.ends_with(".embed")) {
      for (float v : t.values()) CHECK(v == 1.0f);
    }
  }
}

TEST_CASE("generator output is bounded and the right shape") {
  for (Conditioning c : {Conditioning::none, Conditioning::concat, Conditioning::scale}) {
    const ModelConfig cfg = small(c);
    Rng rng(7);
    const auto gen = build_generator<float>(cfg, rng);
    Graph<float> g(false);
    const std::vector<int> labels = {0, 1, 2};
    const Tensor<float> x = generator_forward(g, gen, sample_uniform<float>({3, 8}, rng), labels, cfg);
    CHECK(x.shape() == Shape{3, 1024, 1});
    for (float v : x.values()) CHECK((v >= -1.0f && v <= 1.0f));
  }
}

TEST_CASE("unconditioned generator ignores labels") {
  const ModelConfig cfg = small(Conditioning::none);
  Rng rng(8);
  const auto gen = build_generator<float>(cfg, rng);
  const Tensor<float> z = sample_uniform<float>({2, 8}, rng);
  Graph<float> g(false);
  const std::vector<int> a = {0, 1}, b = {2, 2};
  CHECK(linf(generator_forward(g, gen, z, a, cfg), generator_forward(g, gen, z, b, cfg)) == 0.0f);
}

TEST_CASE("unit scale embeddings reproduce the unconditioned model bit-exactly") {
  const ModelConfig none = small(Conditioning::none);
  const ModelConfig scale = small(Conditioning::scale);
  Rng r1(9), r2(9);
  const auto gen_none = build_generator<float>(none, r1);
  const auto gen_scale = build_generator<float>(scale, r2);
  const auto disc_none = build_discriminator<float>(none, r1);
  const auto disc_scale = build_discriminator<float>(scale, r2);
  Rng zr(10);
  const Tensor<float> z = sample_uniform<float>({3, 8}, zr);
  const std::vector<int> labels = {0, 1, 2};
  Graph<float> g(false);
  const Tensor<float> a = generator_forward(g, gen_none, z, labels, none);
  const Tensor<float> b = generator_forward(g, gen_scale, z, labels, scale);
  CHECK(linf(a, b) == 0.0f);
  Rng s1(11), s2(11);
  CHECK(linf(discriminator_forward(g, disc_none, a, labels, none, &s1),
             discriminator_forward(g, disc_scale, a, labels, scale, &s2)) == 0.0f);
}

TEST_CASE("changing the label changes the output under conditioning") {
  for (Conditioning c : {Conditioning::concat, Conditioning::scale}) {
    const ModelConfig cfg = small(c);
    Rng rng(12);
    auto gen = build_generator<float>(cfg, rng);
    // Perturb the scale tables so labels are distinguishable.
    for (auto& e : gen.scale_embed) {
      Rng pr(13);
      for (float& v : e.mutable_values()) v += 0.1f * static_cast<float>(pr.uniform01() - 0.5);
    }
    const Tensor<float> z = sample_uniform<float>({1, 8}, rng);
    Graph<float> g(false);
    const std::vector<int> a = {0}, b = {1};
    CHECK(linf(generator_forward(g, gen, z, a, cfg), generator_forward(g, gen, z, b, cfg)) > 0.0f);
  }
}

TEST_CASE("discriminator behaviour") {
  const ModelConfig cfg = small(Conditioning::concat);
  Rng rng(14);
  const auto disc = build_discriminator<float>(cfg, rng);
  Graph<float> g(false);
  const std::vector<int> labels = {0, 2};
  SECTION("zeros give a finite score per item") {
    const Tensor<float> out = discriminator_forward(g, disc, Tensor<float>({2, 1024, 1}), labels, cfg, nullptr);
    CHECK(out.shape() == Shape{2, 1});
    for (float v : out.values()) CHECK(std::isfinite(v));
  }
  SECTION("wrong length is an input error") {
    CHECK_THROWS_AS(discriminator_forward(g, disc, Tensor<float>({2, 512, 1}), labels, cfg, nullptr), InputError);
  }
  SECTION("bad label is an input error") {
    const std::vector<int> bad = {0, 3};
    CHECK_THROWS_AS(discriminator_forward(g, disc, Tensor<float>({2, 1024, 1}), bad, cfg, nullptr), InputError);
  }
  SECTION("without phase shuffle the rng does not matter") {
    ModelConfig off = cfg;
    off.phase_shuffle = 0;
    const Tensor<float> x = sample_uniform<float>({2, 1024, 1}, rng);
    Rng a(1), b(2);
    CHECK(linf(discriminator_forward(g, disc, x, labels, off, &a), discriminator_forward(g, disc, x, labels, off, &b)) ==
          0.0f);
  }
  SECTION("phase shuffle runs after every LReLU but the last") {
    LayerTrace trace;
    Rng s(3);
    discriminator_forward(g, disc, Tensor<float>({2, 1024, 1}), labels, cfg, &s, &trace);
    std::size_t shuffles = 0;
    for (const auto& l : trace) shuffles += l.name == "phase_shuffle";
    CHECK(shuffles == cfg.layers() - 1);
  }
}
