#pragma once

#include <cstdint>
#include <vector>

#include "cwavegan/model.hpp"
#include "cwavegan/tensor.hpp"

namespace cwavegan {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Learning rate used when none is configured: 1e-4 for WGAN-GP, 2e-4 for DCGAN.
double default_learning_rate(LossMode mode);

/// First/second moment estimates, one pair per parameter, in parameter order.
template <typename T>
struct AdamState {
  AdamConfig config;
  std::uint64_t t = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;

  static AdamState init(const NamedTensors<T>& params, const AdamConfig& config);
};

/// One bias-corrected Adam update. All gradients are checked before any
/// parameter is touched; a non-finite gradient throws NumericError naming the
/// parameter and leaves params and state unchanged.
template <typename T>
void adam_step(const NamedTensors<T>& params, const std::vector<Tensor<T>>& grads,
               AdamState<T>& state);

/// Same, reading each parameter's accumulated .grad (missing grads count as zero).
template <typename T>
void adam_step(const NamedTensors<T>& params, AdamState<T>& state);

struct Schedule {
  std::size_t d_updates_per_g = 5;
};

}  // namespace cwavegan
