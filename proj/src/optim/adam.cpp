#include <cmath>

#include "cwavegan/optim.hpp"

namespace cwavegan {

double default_learning_rate(LossMode mode) { return mode == LossMode::dcgan ? 2e-4 : 1e-4; }

template <typename T>
AdamState<T> AdamState<T>::init(const NamedTensors<T>& params, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const auto& [name, p] : params) {
    s.m.emplace_back(p.shape());
    s.v.emplace_back(p.shape());
  }
  return s;
}

template <typename T>
void adam_step(const NamedTensors<T>& params, const std::vector<Tensor<T>>& grads,
               AdamState<T>& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " +
                         std::to_string(state.m.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, p] = params[i];
    if (!grads[i].defined()) continue;
    if (grads[i].shape() != p.shape()) {
      throw DimensionError("adam_step: gradient for " + name + " has shape " +
                           shape_str(grads[i].shape()) + ", parameter is " + shape_str(p.shape()));
    }
    for (T g : grads[i].values()) {
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient for parameter " + name);
    }
  }

  const AdamConfig& c = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T> p = params[i].second;
    auto values = p.mutable_values();
    auto m = state.m[i].mutable_values();
    auto v = state.v[i].mutable_values();
    const bool has_grad = grads[i].defined();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = has_grad ? static_cast<double>(grads[i].values()[j]) : 0.0;
      const double mj = c.beta1 * static_cast<double>(m[j]) + (1.0 - c.beta1) * g;
      const double vj = c.beta2 * static_cast<double>(v[j]) + (1.0 - c.beta2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double step = c.lr * (mj / correct1) / (std::sqrt(vj / correct2) + c.eps);
      values[j] = static_cast<T>(static_cast<double>(values[j]) - step);
    }
  }
}

template <typename T>
void adam_step(const NamedTensors<T>& params, AdamState<T>& state) {
  std::vector<Tensor<T>> grads;
  grads.reserve(params.size());
  for (const auto& [name, p] : params) grads.push_back(p.grad());
  adam_step(params, grads, state);
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(const NamedTensors<float>&, const std::vector<Tensor<float>>&,
                               AdamState<float>&);
template void adam_step<double>(const NamedTensors<double>&, const std::vector<Tensor<double>>&,
                                AdamState<double>&);
template void adam_step<float>(const NamedTensors<float>&, AdamState<float>&);
template void adam_step<double>(const NamedTensors<double>&, AdamState<double>&);

}  // namespace cwavegan
