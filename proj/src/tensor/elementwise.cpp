#include <cmath>

#include "op_util.hpp"

namespace cwavegan::ops {

using detail::Grads;
using detail::map;
using detail::zip;

template <typename T>
Tensor<T> add(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("add", a.shape(), b.shape());
  return g.record("add", zip(a, b, [](T x, T y) { return x + y; }), {a, b},
                  [](Graph<T>&, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{gout, gout};
                  });
}

template <typename T>
Tensor<T> sub(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("sub", a.shape(), b.shape());
  return g.record("sub", zip(a, b, [](T x, T y) { return x - y; }), {a, b},
                  [](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>& needs) {
                    return Grads<T>{gout, needs[1] ? scale(g, gout, T(-1)) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> mul(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("mul", a.shape(), b.shape());
  return g.record("mul", zip(a, b, [](T x, T y) { return x * y; }), {a, b},
                  [a, b](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>& needs) {
                    return Grads<T>{needs[0] ? mul(g, gout, b) : Tensor<T>(),
                                    needs[1] ? mul(g, gout, a) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> div(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_same_shape("div", a.shape(), b.shape());
  Tensor<T> y = zip(a, b, [](T x, T z) { return x / z; });
  return g.record("div", y, {a, b},
                  [b, y](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>& needs) {
                    Tensor<T> ga = div(g, gout, b);
                    Tensor<T> gb = needs[1] ? scale(g, mul(g, ga, y), T(-1)) : Tensor<T>();
                    return Grads<T>{ga, gb};
                  });
}

template <typename T>
Tensor<T> scale(Graph<T>& g, const Tensor<T>& x, T factor) {
  return g.record("scale", map(x, [factor](T v) { return v * factor; }), {x},
                  [factor](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{scale(g, gout, factor)};
                  });
}

template <typename T>
Tensor<T> add_scalar(Graph<T>& g, const Tensor<T>& x, T offset) {
  return g.record("add_scalar", map(x, [offset](T v) { return v + offset; }), {x},
                  [](Graph<T>&, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{gout};
                  });
}

template <typename T>
Tensor<T> square(Graph<T>& g, const Tensor<T>& x) {
  return g.record("square", map(x, [](T v) { return v * v; }), {x},
                  [x](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{mul(g, gout, scale(g, x, T(2)))};
                  });
}

template <typename T>
Tensor<T> sqrt(Graph<T>& g, const Tensor<T>& x) {
  Tensor<T> y = map(x, [](T v) { return std::sqrt(v); });
  return g.record("sqrt", y, {x},
                  [y](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{mul(g, gout, scale(g, reciprocal(g, y), T(0.5)))};
                  });
}

template <typename T>
Tensor<T> reciprocal(Graph<T>& g, const Tensor<T>& x) {
  Tensor<T> y = map(x, [](T v) { return v == T(0) ? T(0) : T(1) / v; });
  return g.record("reciprocal", y, {x},
                  [y](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{mul(g, gout, scale(g, square(g, y), T(-1)))};
                  });
}

template <typename T>
Tensor<T> relu(Graph<T>& g, const Tensor<T>& x) {
  return g.record("relu", map(x, [](T v) { return v > T(0) ? v : T(0); }), {x},
                  [x](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    Tensor<T> mask = map(x, [](T v) { return v > T(0) ? T(1) : T(0); });
                    return Grads<T>{mul(g, gout, mask)};
                  });
}

template <typename T>
Tensor<T> leaky_relu(Graph<T>& g, const Tensor<T>& x, T slope) {
  return g.record("leaky_relu", map(x, [slope](T v) { return v >= T(0) ? v : slope * v; }), {x},
                  [x, slope](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    Tensor<T> mask = map(x, [slope](T v) { return v >= T(0) ? T(1) : slope; });
                    return Grads<T>{mul(g, gout, mask)};
                  });
}

template <typename T>
Tensor<T> tanh(Graph<T>& g, const Tensor<T>& x) {
  Tensor<T> y = map(x, [](T v) { return std::tanh(v); });
  return g.record("tanh", y, {x},
                  [y](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    // 1 - y^2
                    Tensor<T> slope = add_scalar(g, scale(g, square(g, y), T(-1)), T(1));
                    return Grads<T>{mul(g, gout, slope)};
                  });
}

namespace {
template <typename T>
T stable_sigmoid(T v) {
  if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
  const T e = std::exp(v);
  return e / (T(1) + e);
}
}  // namespace

template <typename T>
Tensor<T> sigmoid(Graph<T>& g, const Tensor<T>& x) {
  Tensor<T> y = map(x, [](T v) { return stable_sigmoid(v); });
  return g.record("sigmoid", y, {x},
                  [y](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    // y (1 - y)
                    Tensor<T> slope = mul(g, y, add_scalar(g, scale(g, y, T(-1)), T(1)));
                    return Grads<T>{mul(g, gout, slope)};
                  });
}

template <typename T>
Tensor<T> softplus(Graph<T>& g, const Tensor<T>& x) {
  Tensor<T> y = map(x, [](T v) { return std::max(v, T(0)) + std::log1p(std::exp(-std::abs(v))); });
  return g.record("softplus", y, {x},
                  [x](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{mul(g, gout, sigmoid(g, x))};
                  });
}

template <typename T>
Tensor<T> activation(Graph<T>& g, const Tensor<T>& x, Activation kind) {
  switch (kind) {
    case Activation::relu:
      return relu(g, x);
    case Activation::leaky_relu:
      return leaky_relu(g, x, static_cast<T>(kLeakySlope));
    case Activation::tanh:
      return tanh(g, x);
    case Activation::sigmoid:
      return sigmoid(g, x);
  }
  throw ContractError("unknown activation");
}

#define CWAVEGAN_ELEMENTWISE(T)                                                       \
  template Tensor<T> add<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);          \
  template Tensor<T> sub<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);          \
  template Tensor<T> mul<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);          \
  template Tensor<T> div<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);          \
  template Tensor<T> scale<T>(Graph<T>&, const Tensor<T>&, T);                       \
  template Tensor<T> add_scalar<T>(Graph<T>&, const Tensor<T>&, T);                  \
  template Tensor<T> square<T>(Graph<T>&, const Tensor<T>&);                         \
  template Tensor<T> sqrt<T>(Graph<T>&, const Tensor<T>&);                           \
  template Tensor<T> reciprocal<T>(Graph<T>&, const Tensor<T>&);                     \
  template Tensor<T> relu<T>(Graph<T>&, const Tensor<T>&);                           \
  template Tensor<T> leaky_relu<T>(Graph<T>&, const Tensor<T>&, T);                  \
  template Tensor<T> tanh<T>(Graph<T>&, const Tensor<T>&);                           \
  template Tensor<T> sigmoid<T>(Graph<T>&, const Tensor<T>&);                        \
  template Tensor<T> softplus<T>(Graph<T>&, const Tensor<T>&);                       \
  template Tensor<T> activation<T>(Graph<T>&, const Tensor<T>&, Activation);

CWAVEGAN_INSTANTIATE(CWAVEGAN_ELEMENTWISE)

}  // namespace cwavegan::ops
