#pragma once

#include <span>

#include "cwavegan/graph.hpp"
#include "cwavegan/random.hpp"
#include "cwavegan/tensor.hpp"

namespace cwavegan {

inline constexpr double kDefaultGradientPenaltyWeight = 10.0;

/// Scalars reported after a training step.
struct LossReport {
  double d_loss = 0;
  double g_loss = 0;
  double penalty = 0;  // 0 for dcgan
  double d_real_mean = 0;
  double d_fake_mean = 0;

  bool finite() const;
  bool operator==(const LossReport&) const = default;
};

// All scores are raw discriminator outputs of shape (n, 1); no sigmoid is
// applied before these functions.

/// -mean log sigmoid(real) - mean log(1 - sigmoid(fake)), via softplus.
template <typename T>
Tensor<T> dcgan_d_loss(Graph<T>& g, const Tensor<T>& d_real, const Tensor<T>& d_fake);

/// Non-saturating generator loss -mean log sigmoid(fake).
template <typename T>
Tensor<T> dcgan_g_loss(Graph<T>& g, const Tensor<T>& d_fake);

/// mean(fake) - mean(real) + lambda * penalty.
template <typename T>
Tensor<T> wgangp_d_loss(Graph<T>& g, const Tensor<T>& d_real, const Tensor<T>& d_fake,
                        const Tensor<T>& penalty, T lambda);

/// -mean(fake).
template <typename T>
Tensor<T> wgangp_g_loss(Graph<T>& g, const Tensor<T>& d_fake);

/// Per-item mix eps*real + (1-eps)*fake with eps ~ U[0,1). The result is a
/// fresh leaf with requires_grad set, ready to feed the critic.
template <typename T>
Tensor<T> interpolate(const Tensor<T>& x_real, const Tensor<T>& x_fake, Rng& rng);

/// Same with explicit per-item eps.
template <typename T>
Tensor<T> interpolate(const Tensor<T>& x_real, const Tensor<T>& x_fake, std::span<const T> eps);

/// mean_i (||d D(x_hat_i) / d x_hat_i||_2 - 1)^2. The input gradient is
/// recorded on `g`, so the returned scalar can be backpropagated to the
/// critic parameters.
template <typename T>
Tensor<T> grad_norm_penalty(Graph<T>& g, const Tensor<T>& d_output, const Tensor<T>& x_hat);

}  // namespace cwavegan
