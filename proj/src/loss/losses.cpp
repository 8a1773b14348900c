#include <cmath>

#include "cwavegan/loss.hpp"
#include "cwavegan/ops.hpp"

namespace cwavegan {

bool LossReport::finite() const {
  return std::isfinite(d_loss) && std::isfinite(g_loss) && std::isfinite(penalty) &&
         std::isfinite(d_real_mean) && std::isfinite(d_fake_mean);
}

template <typename T>
Tensor<T> dcgan_d_loss(Graph<T>& g, const Tensor<T>& d_real, const Tensor<T>& d_fake) {
  // -log sigmoid(r) = softplus(-r); -log(1 - sigmoid(f)) = softplus(f)
  Tensor<T> real_term = ops::mean(g, ops::softplus(g, ops::scale(g, d_real, T(-1))));
  Tensor<T> fake_term = ops::mean(g, ops::softplus(g, d_fake));
  return ops::add(g, real_term, fake_term);
}

template <typename T>
Tensor<T> dcgan_g_loss(Graph<T>& g, const Tensor<T>& d_fake) {
  return ops::mean(g, ops::softplus(g, ops::scale(g, d_fake, T(-1))));
}

template <typename T>
Tensor<T> wgangp_d_loss(Graph<T>& g, const Tensor<T>& d_real, const Tensor<T>& d_fake,
                        const Tensor<T>& penalty, T lambda) {
  Tensor<T> critic = ops::sub(g, ops::mean(g, d_fake), ops::mean(g, d_real));
  return ops::add(g, critic, ops::scale(g, penalty, lambda));
}

template <typename T>
Tensor<T> wgangp_g_loss(Graph<T>& g, const Tensor<T>& d_fake) {
  return ops::scale(g, ops::mean(g, d_fake), T(-1));
}

template <typename T>
Tensor<T> interpolate(const Tensor<T>& x_real, const Tensor<T>& x_fake, std::span<const T> eps) {
  if (x_real.shape() != x_fake.shape()) {
    throw DimensionError("interpolate: real " + shape_str(x_real.shape()) + " vs fake " +
                         shape_str(x_fake.shape()));
  }
  const std::size_t n = x_real.dim(0);
  if (eps.size() != n) throw DimensionError("interpolate: need one eps per item");
  const std::size_t per = x_real.numel() / n;
  Tensor<T> out(x_real.shape(), true);
  auto r = x_real.values();
  auto f = x_fake.values();
  auto dst = out.mutable_values();
  for (std::size_t b = 0; b < n; ++b) {
    const T e = eps[b];
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) dst[i] = e * r[i] + (T(1) - e) * f[i];
  }
  return out;
}

template <typename T>
Tensor<T> interpolate(const Tensor<T>& x_real, const Tensor<T>& x_fake, Rng& rng) {
  std::vector<T> eps(x_real.dim(0));
  for (T& e : eps) e = static_cast<T>(rng.uniform01());
  return interpolate(x_real, x_fake, std::span<const T>(eps));
}

template <typename T>
Tensor<T> grad_norm_penalty(Graph<T>& g, const Tensor<T>& d_output, const Tensor<T>& x_hat) {
  if (!g.contains(x_hat)) throw ContractError("grad_norm_penalty: x_hat is not on the critic graph");
  if (!g.contains(d_output)) {
    throw ContractError("grad_norm_penalty: critic output is not on the graph");
  }
  Tensor<T> grad_x = g.gradient(d_output, {x_hat}, /*create_graph=*/true)[0];
  Tensor<T> norms = ops::sqrt(g, ops::row_sum(g, ops::square(g, grad_x)));
  return ops::mean(g, ops::square(g, ops::add_scalar(g, norms, T(-1))));
}

#define CWAVEGAN_LOSSES(T)                                                                     \
  template Tensor<T> dcgan_d_loss<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> dcgan_g_loss<T>(Graph<T>&, const Tensor<T>&);                             \
  template Tensor<T> wgangp_d_loss<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                      const Tensor<T>&, T);                                    \
  template Tensor<T> wgangp_g_loss<T>(Graph<T>&, const Tensor<T>&);                            \
  template Tensor<T> interpolate<T>(const Tensor<T>&, const Tensor<T>&, std::span<const T>);   \
  template Tensor<T> interpolate<T>(const Tensor<T>&, const Tensor<T>&, Rng&);                 \
  template Tensor<T> grad_norm_penalty<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);

CWAVEGAN_LOSSES(float)
CWAVEGAN_LOSSES(double)

}  // namespace cwavegan
