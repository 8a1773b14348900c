#pragma once

// Independent reference implementations used by the test suites. The
// reference kernels are plain loops written from the definitions; only the
// finite-difference driver touches the library, to build objectives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "cwavegan/graph.hpp"
#include "cwavegan/ops.hpp"
#include "cwavegan/tensor.hpp"

namespace oracle {

using cwavegan::Graph;
using cwavegan::Shape;
using cwavegan::Tensor;

/// y[n, i, co] = sum_{j, ci} x[n, i*s - p + j, ci] * w[j, ci, co], p = (k-1)/2,
/// samples outside [0, L) read as zero.
inline std::vector<double> conv1d(const std::vector<double>& x, std::size_t n, std::size_t len,
                                  std::size_t cin, const std::vector<double>& w, std::size_t k,
                                  std::size_t cout, std::size_t s) {
  const std::size_t out_len = len / s;
  const long p = static_cast<long>((k - 1) / 2);
  std::vector<double> y(n * out_len * cout, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < out_len; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const long t = static_cast<long>(i * s) - p + static_cast<long>(j);
        if (t < 0 || t >= static_cast<long>(len)) continue;
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (std::size_t co = 0; co < cout; ++co)
            y[(b * out_len + i) * cout + co] +=
                x[(b * len + static_cast<std::size_t>(t)) * cin + ci] * w[(j * cin + ci) * cout + co];
      }
  return y;
}

/// Scatter form of the fractionally strided convolution:
/// out[n, i*s - p + j, co] += x[n, i, ci] * w[j, ci, co].
inline std::vector<double> trans_conv1d(const std::vector<double>& x, std::size_t n, std::size_t len,
                                        std::size_t cin, const std::vector<double>& w, std::size_t k,
                                        std::size_t cout, std::size_t s) {
  const std::size_t out_len = len * s;
  const long p = static_cast<long>((k - 1) / 2);
  std::vector<double> y(n * out_len * cout, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const long t = static_cast<long>(i * s) - p + static_cast<long>(j);
        if (t < 0 || t >= static_cast<long>(out_len)) continue;
        for (std::size_t ci = 0; ci < cin; ++ci)
          for (std::size_t co = 0; co < cout; ++co)
            y[(b * out_len + static_cast<std::size_t>(t)) * cout + co] +=
                x[(b * len + i) * cin + ci] * w[(j * cin + ci) * cout + co];
      }
  return y;
}

/// Reflection without repeating the edge sample: -1 -> 1, L -> L-2.
inline long reflect(long t, long len) {
  while (t < 0 || t >= len) {
    if (t < 0) t = -t;
    if (t >= len) t = 2 * (len - 1) - t;
  }
  return t;
}

/// out[t] = x[reflect(t - k)] for one feature map.
inline std::vector<double> shift_reflect(const std::vector<double>& x, long k) {
  const long len = static_cast<long>(x.size());
  std::vector<double> out(x.size());
  for (long t = 0; t < len; ++t) out[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(reflect(t - k, len))];
  return out;
}

inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

/// Norm-wise relative error ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-12) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

/// Scalar objective rebuilt on a fresh graph from the current values of the
/// inputs it closes over.
using Objective = std::function<Tensor<double>(Graph<double>&)>;

/// Central differences of `f` with respect to every entry of `x`. Probes run
/// on recording graphs so objectives may take inner gradients.
inline std::vector<double> numeric_gradient(const Objective& f, Tensor<double> x, double h = 1e-6) {
  std::vector<double> out(x.numel());
  auto values = x.mutable_values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    double up, down;
    {
      Graph<double> g;
      up = f(g).item();
    }
    values[i] = saved - h;
    {
      Graph<double> g;
      down = f(g).item();
    }
    values[i] = saved;
    out[i] = (up - down) / (2 * h);
  }
  return out;
}

/// Worst relative error over `inputs` between the tape gradient and central
/// differences.
inline double gradient_error(const Objective& f, const std::vector<Tensor<double>>& inputs,
                             double h = 1e-6) {
  Graph<double> g;
  const Tensor<double> y = f(g);
  // Inputs the objective never touched have an analytic gradient of zero.
  std::vector<Tensor<double>> reached;
  for (const auto& t : inputs) {
    if (g.contains(t)) reached.push_back(t);
  }
  const std::vector<Tensor<double>> analytic = g.gradient(y, reached);
  double worst = 0;
  std::size_t next = 0;
  for (const auto& t : inputs) {
    std::vector<double> a(t.numel(), 0.0);
    if (g.contains(t)) {
      const Tensor<double>& grad = analytic[next++];
      if (grad.defined()) a.assign(grad.values().begin(), grad.values().end());
    }
    worst = std::max(worst, relative_error(a, numeric_gradient(f, t, h)));
  }
  return worst;
}

/// Values drawn deterministically from a small LCG, in [-1, 1).
inline Tensor<double> random_tensor(const Shape& shape, unsigned seed, bool requires_grad = true) {
  std::vector<double> v(cwavegan::shape_numel(shape));
  std::uint64_t s = 0x2545F4914F6CDD1Dull ^ seed;
  for (double& x : v) {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    x = static_cast<double>(s >> 11) / 9007199254740992.0 * 2.0 - 1.0;
  }
  return Tensor<double>(shape, v, requires_grad);
}

/// Sum of x * r for a fixed random r: turns any tensor into a scalar with a
/// gradient that is generic in every entry.
inline Tensor<double> project(Graph<double>& g, const Tensor<double>& x, unsigned seed = 77) {
  const Tensor<double> r = random_tensor(x.shape(), seed, false);
  return cwavegan::ops::sum(g, cwavegan::ops::mul(g, x, r));
}

}  // namespace oracle
