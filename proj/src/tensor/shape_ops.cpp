#include <algorithm>

#include "op_util.hpp"

namespace cwavegan::ops {

using detail::Grads;

namespace {

// Splits `shape` around `axis` into (outer, mid, inner) extents.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t mid = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.mid = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

void require_axis(const char* op, const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(shape));
  }
}

}  // namespace

template <typename T>
Tensor<T> sum(Graph<T>& g, const Tensor<T>& x) {
  T total = 0;
  for (T v : x.values()) total += v;
  return g.record("sum", Tensor<T>::scalar(total), {x},
                  [shape = x.shape()](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{fill(g, gout, shape)};
                  });
}

template <typename T>
Tensor<T> mean(Graph<T>& g, const Tensor<T>& x) {
  return scale(g, sum(g, x), T(1) / static_cast<T>(x.numel()));
}

template <typename T>
Tensor<T> fill(Graph<T>& g, const Tensor<T>& scalar, const Shape& shape) {
  if (scalar.numel() != 1) {
    throw DimensionError("fill: source must hold one value, got " + shape_str(scalar.shape()));
  }
  return g.record("fill", Tensor<T>::full(shape, scalar.values()[0]), {scalar},
                  [src = scalar.shape()](Graph<T>& g, const Tensor<T>& gout,
                                         const std::vector<bool>&) {
                    return Grads<T>{reshape(g, sum(g, gout), src)};
                  });
}

template <typename T>
Tensor<T> sum_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis) {
  require_axis("sum_axis", x.shape(), axis);
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  if (out_shape.empty()) out_shape = {1};
  Tensor<T> out(out_shape);
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t m = 0; m < s.mid; ++m) {
      const T* row = src.data() + (o * s.mid + m) * s.inner;
      T* acc = dst.data() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) acc[i] += row[i];
    }
  }
  return g.record("sum_axis", out, {x},
                  [shape = x.shape(), axis](Graph<T>& g, const Tensor<T>& gout,
                                            const std::vector<bool>&) {
                    Shape kept = shape;
                    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(axis));
                    Tensor<T> src = kept.empty() ? gout : reshape(g, gout, kept);
                    return Grads<T>{expand_axis(g, src, axis, shape[axis])};
                  });
}

template <typename T>
Tensor<T> expand_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t size) {
  Shape out_shape = x.shape();
  // A (1)-shaped input expanding at axis 0 is treated as a scalar.
  const bool scalar_source = x.rank() == 1 && x.dim(0) == 1 && axis == 0;
  if (scalar_source) {
    out_shape = {size};
  } else {
    if (axis > out_shape.size()) {
      throw DimensionError("expand_axis: axis " + std::to_string(axis) +
                           " out of range for shape " + shape_str(x.shape()));
    }
    out_shape.insert(out_shape.begin() + static_cast<std::ptrdiff_t>(axis), size);
  }
  const AxisSplit s = split_at(out_shape, axis);
  Tensor<T> out(out_shape);
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    const T* row = src.data() + o * s.inner;
    for (std::size_t m = 0; m < s.mid; ++m) {
      std::copy(row, row + s.inner, dst.data() + (o * s.mid + m) * s.inner);
    }
  }
  return g.record("expand_axis", out, {x},
                  [axis, src_shape = x.shape()](Graph<T>& g, const Tensor<T>& gout,
                                                const std::vector<bool>&) {
                    Tensor<T> r = sum_axis(g, gout, axis);
                    if (r.shape() != src_shape) r = reshape(g, r, src_shape);
                    return Grads<T>{r};
                  });
}

template <typename T>
Tensor<T> row_sum(Graph<T>& g, const Tensor<T>& x) {
  const std::size_t n = x.dim(0);
  const std::size_t m = x.numel() / n;
  if (m == 1) return reshape(g, x, Shape{n});
  return sum_axis(g, reshape(g, x, Shape{n, m}), 1);
}

template <typename T>
Tensor<T> reshape(Graph<T>& g, const Tensor<T>& x, const Shape& shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(shape));
  }
  Tensor<T> out(shape, std::vector<T>(x.values().begin(), x.values().end()));
  return g.record("reshape", out, {x},
                  [src = x.shape()](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{reshape(g, gout, src)};
                  });
}

template <typename T>
Tensor<T> concat(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b, std::size_t axis) {
  if (!b.defined()) return a;
  if (!a.defined()) return b;
  require_axis("concat", a.shape(), axis);
  if (a.rank() != b.rank()) {
    throw DimensionError("concat: rank mismatch between " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  }
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (i != axis && a.dim(i) != b.dim(i)) {
      throw DimensionError("concat: shapes " + shape_str(a.shape()) + " and " +
                           shape_str(b.shape()) + " differ off axis " + std::to_string(axis));
    }
  }
  Shape out_shape = a.shape();
  out_shape[axis] += b.dim(axis);
  const AxisSplit sa = split_at(a.shape(), axis);
  const AxisSplit sb = split_at(b.shape(), axis);
  Tensor<T> out(out_shape);
  auto dst = out.mutable_values();
  auto va = a.values();
  auto vb = b.values();
  const std::size_t chunk_a = sa.mid * sa.inner;
  const std::size_t chunk_b = sb.mid * sb.inner;
  for (std::size_t o = 0; o < sa.outer; ++o) {
    T* row = dst.data() + o * (chunk_a + chunk_b);
    std::copy_n(va.data() + o * chunk_a, chunk_a, row);
    std::copy_n(vb.data() + o * chunk_b, chunk_b, row + chunk_a);
  }
  const std::size_t la = a.dim(axis);
  const std::size_t lb = b.dim(axis);
  return g.record("concat", out, {a, b},
                  [axis, la, lb](Graph<T>& g, const Tensor<T>& gout,
                                 const std::vector<bool>& needs) {
                    return Grads<T>{needs[0] ? slice(g, gout, axis, 0, la) : Tensor<T>(),
                                    needs[1] ? slice(g, gout, axis, la, lb) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> slice(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t begin,
                std::size_t length) {
  require_axis("slice", x.shape(), axis);
  if (length == 0 || begin + length > x.dim(axis)) {
    throw DimensionError("slice: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + length) + ") out of bounds for " +
                         shape_str(x.shape()));
  }
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = length;
  Tensor<T> out(out_shape);
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(src.data() + (o * s.mid + begin) * s.inner, length * s.inner,
                dst.data() + o * length * s.inner);
  }
  const std::size_t full = x.dim(axis);
  return g.record("slice", out, {x},
                  [axis, begin, full](Graph<T>& g, const Tensor<T>& gout,
                                      const std::vector<bool>&) {
                    return Grads<T>{pad_axis(g, gout, axis, begin, full)};
                  });
}

template <typename T>
Tensor<T> pad_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t begin,
                   std::size_t size) {
  require_axis("pad_axis", x.shape(), axis);
  const std::size_t length = x.dim(axis);
  if (begin + length > size) {
    throw DimensionError("pad_axis: source " + shape_str(x.shape()) + " does not fit in " +
                         std::to_string(size) + " at " + std::to_string(begin));
  }
  const AxisSplit s = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = size;
  Tensor<T> out(out_shape);
  auto src = x.values();
  auto dst = out.mutable_values();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(src.data() + o * length * s.inner, length * s.inner,
                dst.data() + (o * size + begin) * s.inner);
  }
  return g.record("pad_axis", out, {x},
                  [axis, begin, length](Graph<T>& g, const Tensor<T>& gout,
                                        const std::vector<bool>&) {
                    return Grads<T>{slice(g, gout, axis, begin, length)};
                  });
}

template <typename T>
Tensor<T> scale_channels(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& s) {
  detail::require_rank("scale_channels", "x", x.shape(), 3);
  detail::require_rank("scale_channels", "s", s.shape(), 2);
  const std::size_t n = x.dim(0), len = x.dim(1), c = x.dim(2);
  if (s.dim(0) != n || s.dim(1) != c) {
    throw DimensionError("scale_channels: scale " + shape_str(s.shape()) +
                         " does not match channels of " + shape_str(x.shape()));
  }
  Tensor<T> out(x.shape());
  auto src = x.values();
  auto sv = s.values();
  auto dst = out.mutable_values();
  for (std::size_t b = 0; b < n; ++b) {
    const T* row_s = sv.data() + b * c;
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t base = (b * len + t) * c;
      for (std::size_t j = 0; j < c; ++j) dst[base + j] = src[base + j] * row_s[j];
    }
  }
  return g.record("scale_channels", out, {x, s},
                  [x, s](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>& needs) {
                    return Grads<T>{
                        needs[0] ? scale_channels(g, gout, s) : Tensor<T>(),
                        needs[1] ? sum_axis(g, mul(g, gout, x), 1) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> one_hot(std::span<const int> labels, std::size_t classes) {
  if (labels.empty()) throw InputError("one_hot: no labels");
  Tensor<T> out(Shape{labels.size(), classes});
  auto dst = out.mutable_values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw InputError("label " + std::to_string(labels[i]) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
    dst[i * classes + static_cast<std::size_t>(labels[i])] = T(1);
  }
  return out;
}

#define CWAVEGAN_SHAPE_OPS(T)                                                                  \
  template Tensor<T> sum<T>(Graph<T>&, const Tensor<T>&);                                      \
  template Tensor<T> mean<T>(Graph<T>&, const Tensor<T>&);                                     \
  template Tensor<T> row_sum<T>(Graph<T>&, const Tensor<T>&);                                  \
  template Tensor<T> fill<T>(Graph<T>&, const Tensor<T>&, const Shape&);                       \
  template Tensor<T> sum_axis<T>(Graph<T>&, const Tensor<T>&, std::size_t);                    \
  template Tensor<T> expand_axis<T>(Graph<T>&, const Tensor<T>&, std::size_t, std::size_t);    \
  template Tensor<T> reshape<T>(Graph<T>&, const Tensor<T>&, const Shape&);                    \
  template Tensor<T> concat<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t);    \
  template Tensor<T> slice<T>(Graph<T>&, const Tensor<T>&, std::size_t, std::size_t,           \
                              std::size_t);                                                    \
  template Tensor<T> pad_axis<T>(Graph<T>&, const Tensor<T>&, std::size_t, std::size_t,        \
                                 std::size_t);                                                 \
  template Tensor<T> scale_channels<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> one_hot<T>(std::span<const int>, std::size_t);

CWAVEGAN_INSTANTIATE(CWAVEGAN_SHAPE_OPS)

}  // namespace cwavegan::ops
