#include <memory>
#include <vector>

#include "cwavegan/model.hpp"

namespace cwavegan {

namespace {

// Source index for output position t under shift k, reflecting at both ends.
std::size_t reflect_source(std::ptrdiff_t t, int k, std::size_t len) {
  const auto last = static_cast<std::ptrdiff_t>(len) - 1;
  std::ptrdiff_t src = t - k;
  while (src < 0 || src > last) {
    if (last == 0) return 0;
    if (src < 0) src = -src;
    if (src > last) src = 2 * last - src;
  }
  return static_cast<std::size_t>(src);
}

template <typename T>
Tensor<T> time_shift_adjoint(Graph<T>& g, const Tensor<T>& y,
                             std::shared_ptr<const std::vector<int>> shifts);

template <typename T>
Tensor<T> time_shift_impl(Graph<T>& g, const Tensor<T>& x,
                          std::shared_ptr<const std::vector<int>> shifts) {
  const std::size_t n = x.dim(0), len = x.dim(1), c = x.dim(2);
  Tensor<T> out(x.shape());
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const int k = (*shifts)[b * c + ch];
      for (std::size_t t = 0; t < len; ++t) {
        const std::size_t s = reflect_source(static_cast<std::ptrdiff_t>(t), k, len);
        dst[(b * len + t) * c + ch] = src[(b * len + s) * c + ch];
      }
    }
  }
  return g.record("time_shift", out, {x},
                  [shifts](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return std::vector<Tensor<T>>{time_shift_adjoint(g, gout, shifts)};
                  });
}

template <typename T>
Tensor<T> time_shift_adjoint(Graph<T>& g, const Tensor<T>& y,
                             std::shared_ptr<const std::vector<int>> shifts) {
  const std::size_t n = y.dim(0), len = y.dim(1), c = y.dim(2);
  Tensor<T> out(y.shape());
  auto src = y.values();
  auto dst = out.mutable_values();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const int k = (*shifts)[b * c + ch];
      for (std::size_t t = 0; t < len; ++t) {
        const std::size_t s = reflect_source(static_cast<std::ptrdiff_t>(t), k, len);
        dst[(b * len + s) * c + ch] += src[(b * len + t) * c + ch];
      }
    }
  }
  return g.record("time_shift_adjoint", out, {y},
                  [shifts](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return std::vector<Tensor<T>>{time_shift_impl(g, gout, shifts)};
                  });
}

}  // namespace

template <typename T>
Tensor<T> time_shift(Graph<T>& g, const Tensor<T>& x, std::span<const int> shifts) {
  if (x.rank() != 3) throw DimensionError("time_shift: expected (n, L, c), got " + shape_str(x.shape()));
  if (shifts.size() != x.dim(0) * x.dim(2)) {
    throw DimensionError("time_shift: need one shift per feature map (" +
                         std::to_string(x.dim(0) * x.dim(2)) + "), got " +
                         std::to_string(shifts.size()));
  }
  return time_shift_impl(g, x, std::make_shared<const std::vector<int>>(shifts.begin(), shifts.end()));
}

template <typename T>
Tensor<T> phase_shuffle(Graph<T>& g, const Tensor<T>& x, std::size_t radius, Rng& rng) {
  if (radius == 0) return x;
  if (x.rank() != 3) throw DimensionError("phase_shuffle: expected (n, L, c), got " + shape_str(x.shape()));
  std::vector<int> shifts(x.dim(0) * x.dim(2));
  const auto r = static_cast<std::int64_t>(radius);
  for (int& k : shifts) k = static_cast<int>(rng.uniform_int(-r, r));
  return time_shift_impl(g, x, std::make_shared<const std::vector<int>>(std::move(shifts)));
}

template Tensor<float> time_shift<float>(Graph<float>&, const Tensor<float>&, std::span<const int>);
template Tensor<double> time_shift<double>(Graph<double>&, const Tensor<double>&, std::span<const int>);
template Tensor<float> phase_shuffle<float>(Graph<float>&, const Tensor<float>&, std::size_t, Rng&);
template Tensor<double> phase_shuffle<double>(Graph<double>&, const Tensor<double>&, std::size_t, Rng&);

}  // namespace cwavegan
