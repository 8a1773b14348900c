#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "cwavegan/ops.hpp"
#include "cwavegan/optim.hpp"
#include "cwavegan/trainer.hpp"

using namespace cwavegan;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

NamedTensors<double> one_param(double v) { return {{"theta", Tensor<double>({1}, {v}, true)}}; }

ModelConfig tiny_model(LossMode loss) {
  ModelConfig cfg;
  cfg.d = 2;
  cfg.length = 256;
  cfg.strides = {4, 4};
  cfg.num_classes = 2;
  cfg.z_dim = 4;
  cfg.kernel = 9;
  cfg.loss = loss;
  return cfg;
}

std::vector<float> flatten(const NamedTensors<float>& params) {
  std::vector<float> out;
  for (const auto& [n, t] : params) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

}  // namespace

TEST_CASE("first Adam step moves by the learning rate against the gradient sign") {
  for (double grad : {3.0, -0.01, 250.0}) {
    auto params = one_param(1.0);
    auto state = AdamState<double>::init(params, {0.1, 0.9, 0.999, 1e-8});
    adam_step(params, {Tensor<double>({1}, std::vector<double>{grad})}, state);
    CHECK_THAT(params[0].second.item(), WithinAbs(1.0 - 0.1 * (grad > 0 ? 1 : -1), 1e-6));
    CHECK(state.t == 1);
  }
}

TEST_CASE("zero gradients leave parameters unchanged") {
  auto params = one_param(0.5);
  auto state = AdamState<double>::init(params, {});
  for (int i = 0; i < 5; ++i) adam_step(params, {Tensor<double>({1})}, state);
  CHECK(params[0].second.item() == 0.5);
  CHECK(state.t == 5);
}

TEST_CASE("Adam on theta^2 follows the scalar reference recursion") {
  // Reference recursion in long double.
  long double theta = 1, m = 0, v = 0;
  const long double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<long double> expected;
  for (int t = 1; t <= 5; ++t) {
    const long double grad = 2 * theta;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad * grad;
    const long double mhat = m / (1 - std::pow(b1, static_cast<long double>(t)));
    const long double vhat = v / (1 - std::pow(b2, static_cast<long double>(t)));
    theta -= lr * mhat / (std::sqrt(vhat) + eps);
    expected.push_back(theta);
  }
  auto params = one_param(1.0);
  auto state = AdamState<double>::init(params, {0.1, 0.9, 0.999, 1e-8});
  for (int t = 0; t < 5; ++t) {
    Graph<double> g;
    const Tensor<double>& p = params[0].second;
    g.backward(ops::sum(g, ops::square(g, p)));
    adam_step(params, state);
    params[0].second.zero_grad();
    CHECK_THAT(p.item(), WithinRel(static_cast<double>(expected[t]), 1e-12));
  }
}

TEST_CASE("Adam first step keeps the gradient sign pattern under positive scaling") {
  const std::vector<double> g = {0.3, -2.0, 1e-3, -7.5};
  for (double c : {1e-3, 1.0, 1e4}) {
    NamedTensors<double> params = {{"w", Tensor<double>({4}, {0, 0, 0, 0}, true)}};
    auto state = AdamState<double>::init(params, {});
    std::vector<double> scaled;
    for (double x : g) scaled.push_back(c * x);
    adam_step(params, {Tensor<double>({4}, scaled)}, state);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::signbit(params[0].second.values()[i]) != std::signbit(g[i]));
  }
}

TEST_CASE("non-finite gradients abort the step and name the parameter") {
  NamedTensors<double> params = {{"first", Tensor<double>({1}, {1.0}, true)},
                                 {"second", Tensor<double>({2}, {1.0, 2.0}, true)}};
  auto state = AdamState<double>::init(params, {});
  const std::vector<Tensor<double>> grads = {Tensor<double>({1}, std::vector<double>{1.0}),
                                             Tensor<double>({2}, {0.0, std::numeric_limits<double>::quiet_NaN()})};
  try {
    adam_step(params, grads, state);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("second") != std::string::npos);
  }
  CHECK(params[0].second.item() == 1.0);
  CHECK(state.t == 0);
  for (double v : state.m[0].values()) CHECK(v == 0.0);
}

TEST_CASE("Adam state mirrors parameter shapes and keeps v non-negative") {
  NamedTensors<double> params = {{"a", Tensor<double>({2, 3}, true)}, {"b", Tensor<double>({4}, true)}};
  auto state = AdamState<double>::init(params, {});
  REQUIRE(state.m.size() == 2);
  CHECK(state.m[0].shape() == Shape{2, 3});
  CHECK(state.v[1].shape() == Shape{4});
  adam_step(params, {Tensor<double>::full({2, 3}, -3.0), Tensor<double>::full({4}, 2.0)}, state);
  for (const auto& v : state.v)
    for (double x : v.values()) CHECK(x >= 0);
  CHECK_THROWS_AS(adam_step(params, {Tensor<double>({3, 2}), Tensor<double>({4})}, state), DimensionError);
}

TEST_CASE("default learning rates follow the loss mode") {
  CHECK(default_learning_rate(LossMode::wgan_gp) == 1e-4);
  CHECK(default_learning_rate(LossMode::dcgan) == 2e-4);
}

TEST_CASE("train_step bookkeeping") {
  Rng data_rng(1);
  const Corpus corpus = synth_corpus(2, 6, 256, data_rng);
  for (LossMode mode : {LossMode::dcgan, LossMode::wgan_gp}) {
    TrainSettings s;
    s.model = tiny_model(mode);
    s.batch_size = 4;
    TrainState state = TrainState::init(s, 3);
    BatchIterator batches(corpus, 4, data_seed(3));
    for (int k = 1; k <= 3; ++k) {
      const LossReport r = train_step(state, batches, s);
      CHECK(r.finite());
      CHECK(r.penalty >= 0);
      CHECK(state.disc_opt.t == 5u * k);
      CHECK(state.gen_opt.t == static_cast<std::uint64_t>(k));
      CHECK(state.step == static_cast<std::uint64_t>(k));
    }
  }
}

TEST_CASE("train_step with zero learning rates leaves parameters unchanged") {
  Rng data_rng(2);
  const Corpus corpus = synth_corpus(2, 4, 256, data_rng);
  TrainSettings s;
  s.model = tiny_model(LossMode::wgan_gp);
  s.batch_size = 4;
  s.schedule.d_updates_per_g = 1;
  s.gen_opt.lr = 0;
  s.disc_opt.lr = 0;
  TrainState state = TrainState::init(s, 4);
  const auto gen0 = flatten(state.gen.named_parameters());
  const auto disc0 = flatten(state.disc.named_parameters());
  BatchIterator batches(corpus, 4, data_seed(4));
  const LossReport r = train_step(state, batches, s);
  CHECK(r.finite());
  CHECK(flatten(state.gen.named_parameters()) == gen0);
  CHECK(flatten(state.disc.named_parameters()) == disc0);
}

TEST_CASE("train_step is deterministic for a fixed seed") {
  Rng data_rng(5);
  const Corpus corpus = synth_corpus(2, 6, 256, data_rng);
  TrainSettings s;
  s.model = tiny_model(LossMode::wgan_gp);
  s.batch_size = 3;
  auto run = [&] {
    TrainState state = TrainState::init(s, 6);
    BatchIterator batches(corpus, 3, data_seed(6));
    std::vector<LossReport> reports;
    for (int i = 0; i < 3; ++i) reports.push_back(train_step(state, batches, s));
    return std::make_pair(reports, flatten(state.gen.named_parameters()));
  };
  CHECK(run() == run());
}

TEST_CASE("train_step rejects an invalid schedule") {
  Rng data_rng(7);
  const Corpus corpus = synth_corpus(2, 4, 256, data_rng);
  TrainSettings s;
  s.model = tiny_model(LossMode::dcgan);
  s.batch_size = 4;
  s.schedule.d_updates_per_g = 0;
  TrainState state = TrainState::init(s, 1);
  BatchIterator batches(corpus, 4, 1);
  CHECK_THROWS_AS(train_step(state, batches, s), ConfigError);
}
