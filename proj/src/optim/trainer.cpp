#include "cwavegan/trainer.hpp"

#include "cwavegan/ops.hpp"

namespace cwavegan {

namespace {

std::vector<Tensor<float>> tensors_of(const NamedTensors<float>& named) {
  std::vector<Tensor<float>> out;
  out.reserve(named.size());
  for (const auto& [name, t] : named) out.push_back(t);
  return out;
}

double mean_of(const Tensor<float>& t) {
  double s = 0;
  for (float v : t.values()) s += v;
  return s / static_cast<double>(t.numel());
}

LossReport discriminator_update(TrainState& state, const Batch& real,
                                const TrainSettings& settings) {
  const ModelConfig& cfg = settings.model;
  const std::size_t n = real.labels.size();

  Tensor<float> z = sample_uniform<float>({n, cfg.z_dim}, state.rng);
  Tensor<float> fake;
  {
    Graph<float> frozen(false);
    fake = generator_forward(frozen, state.gen, z, real.labels, cfg);
  }

  Graph<float> g;
  Tensor<float> d_real =
      discriminator_forward(g, state.disc, real.samples, real.labels, cfg, &state.rng);
  Tensor<float> d_fake = discriminator_forward(g, state.disc, fake, real.labels, cfg, &state.rng);

  LossReport report;
  Tensor<float> loss;
  if (cfg.loss == LossMode::dcgan) {
    loss = dcgan_d_loss(g, d_real, d_fake);
  } else {
    Tensor<float> x_hat = interpolate(real.samples, fake, state.rng);
    Tensor<float> d_hat = discriminator_forward(g, state.disc, x_hat, real.labels, cfg, &state.rng);
    Tensor<float> penalty = grad_norm_penalty(g, d_hat, x_hat);
    report.penalty = penalty.item();
    loss = wgangp_d_loss(g, d_real, d_fake, penalty, static_cast<float>(settings.gp_lambda));
  }
  report.d_loss = loss.item();
  report.d_real_mean = mean_of(d_real);
  report.d_fake_mean = mean_of(d_fake);

  const NamedTensors<float> params = state.disc.named_parameters();
  adam_step(params, g.gradient(loss, tensors_of(params)), state.disc_opt);
  return report;
}

double generator_update(TrainState& state, const TrainSettings& settings) {
  const ModelConfig& cfg = settings.model;
  const std::size_t n = settings.batch_size;
  std::vector<int> labels(n);
  for (int& y : labels) {
    y = static_cast<int>(state.rng.uniform_int(0, static_cast<std::int64_t>(cfg.num_classes) - 1));
  }
  Tensor<float> z = sample_uniform<float>({n, cfg.z_dim}, state.rng);

  Graph<float> g;
  Tensor<float> fake = generator_forward(g, state.gen, z, labels, cfg);
  Tensor<float> d_fake = discriminator_forward(g, state.disc, fake, labels, cfg, &state.rng);
  Tensor<float> loss =
      cfg.loss == LossMode::dcgan ? dcgan_g_loss(g, d_fake) : wgangp_g_loss(g, d_fake);

  const NamedTensors<float> params = state.gen.named_parameters();
  adam_step(params, g.gradient(loss, tensors_of(params)), state.gen_opt);
  return loss.item();
}

}  // namespace

TrainState TrainState::init(const TrainSettings& settings, std::uint64_t seed) {
  settings.model.validate();
  Rng init_rng(seed, 0);
  TrainState s{build_generator<float>(settings.model, init_rng),
               build_discriminator<float>(settings.model, init_rng),
               {},
               {},
               Rng(seed, 1),
               0};
  s.gen_opt = AdamState<float>::init(s.gen.named_parameters(), settings.gen_opt);
  s.disc_opt = AdamState<float>::init(s.disc.named_parameters(), settings.disc_opt);
  return s;
}

std::uint64_t data_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

LossReport train_step(TrainState& state, BatchIterator& batches, const TrainSettings& settings) {
  if (settings.schedule.d_updates_per_g < 1) throw ConfigError("d_updates_per_g must be >= 1");
  if (settings.batch_size < 1) throw InputError("train_step: empty batch");
  LossReport report;
  for (std::size_t i = 0; i < settings.schedule.d_updates_per_g; ++i) {
    const Batch real = batches.next();
    if (real.labels.empty()) throw InputError("train_step: empty batch");
    report = discriminator_update(state, real, settings);
  }
  report.g_loss = generator_update(state, settings);
  ++state.step;
  return report;
}

}  // namespace cwavegan
