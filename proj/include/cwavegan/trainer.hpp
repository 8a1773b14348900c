#pragma once

#include <cstdint>

#include "cwavegan/audio.hpp"
#include "cwavegan/loss.hpp"
#include "cwavegan/model.hpp"
#include "cwavegan/optim.hpp"
#include "cwavegan/random.hpp"

namespace cwavegan {

struct TrainSettings {
  ModelConfig model;
  AdamConfig gen_opt;
  AdamConfig disc_opt;
  Schedule schedule;
  double gp_lambda = kDefaultGradientPenaltyWeight;
  std::size_t batch_size = 64;
};

/// Everything that evolves during training. Together with the batch
/// iterator position this is the complete checkpointable state.
struct TrainState {
  GeneratorParams<float> gen;
  DiscriminatorParams<float> disc;
  AdamState<float> gen_opt;
  AdamState<float> disc_opt;
  Rng rng;
  std::uint64_t step = 0;

  /// Fresh parameters and optimizer state derived from `seed`.
  static TrainState init(const TrainSettings& settings, std::uint64_t seed);
};

/// Seed of the batch iterator for a run seeded with `seed`.
std::uint64_t data_seed(std::uint64_t seed);

/// One generator iteration: `d_updates_per_g` critic updates, each on the next
/// real mini-batch with fresh z, then one generator update. Fakes seen by the
/// critic carry the real batch's labels; the generator update draws uniform
/// labels. Returns the last critic losses and the generator loss.
LossReport train_step(TrainState& state, BatchIterator& batches, const TrainSettings& settings);

}  // namespace cwavegan
