#pragma once

#include <string>
#include <vector>

#include "cwavegan/ops.hpp"

namespace cwavegan::ops::detail {

template <typename T>
using Grads = std::vector<Tensor<T>>;

inline void require_same_shape(const char* op, const Shape& a, const Shape& b) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                         " differ");
  }
}

inline void require_rank(const char* op, const char* name, const Shape& s, std::size_t rank) {
  if (s.size() != rank) {
    throw DimensionError(std::string(op) + ": " + name + " must have rank " +
                         std::to_string(rank) + ", got " + shape_str(s));
  }
}

// Applies f elementwise into a fresh tensor.
template <typename T, typename F>
Tensor<T> map(const Tensor<T>& x, F f) {
  Tensor<T> out(x.shape());
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

template <typename T, typename F>
Tensor<T> zip(const Tensor<T>& a, const Tensor<T>& b, F f) {
  Tensor<T> out(a.shape());
  auto x = a.values();
  auto y = b.values();
  auto dst = out.mutable_values();
  for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
  return out;
}

}  // namespace cwavegan::ops::detail

#define CWAVEGAN_INSTANTIATE(MACRO) \
  MACRO(float)                      \
  MACRO(double)
