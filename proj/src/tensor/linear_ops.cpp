#include <Eigen/Core>

#include "op_util.hpp"

namespace cwavegan::ops {

using detail::Grads;

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

template <typename T>
ConstMapMat<T> as_matrix(const Tensor<T>& t, std::size_t rows, std::size_t cols) {
  return ConstMapMat<T>(t.values().data(), static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

template <typename T>
MapMat<T> as_matrix(Tensor<T>& t, std::size_t rows, std::size_t cols) {
  return MapMat<T>(t.mutable_values().data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}

// Geometry shared by conv1d and its two adjoints.
struct ConvGeometry {
  std::size_t batch, in_len, in_ch, taps, out_ch, stride, out_len, pad;
};

ConvGeometry conv_geometry(const char* op, const Shape& x, const Shape& w, std::size_t stride) {
  detail::require_rank(op, "input", x, 3);
  detail::require_rank(op, "kernel", w, 3);
  if (stride == 0) throw ConfigError(std::string(op) + ": stride must be positive");
  if (w[1] != x[2]) {
    throw DimensionError(std::string(op) + ": kernel " + shape_str(w) +
                         " expects " + std::to_string(w[1]) + " input channels, input is " +
                         shape_str(x));
  }
  if (x[1] % stride != 0) {
    throw ConfigError(std::string(op) + ": length " + std::to_string(x[1]) +
                      " is not divisible by stride " + std::to_string(stride));
  }
  return {x[0], x[1], x[2], w[0], w[2], stride, x[1] / stride, (w[0] - 1) / 2};
}

// Gathers the receptive fields of every output tap: (batch*out_len, taps*in_ch).
template <typename T>
RowMat<T> im2col(std::span<const T> x, const ConvGeometry& g) {
  RowMat<T> cols = RowMat<T>::Zero(static_cast<Eigen::Index>(g.batch * g.out_len),
                                   static_cast<Eigen::Index>(g.taps * g.in_ch));
  for (std::size_t b = 0; b < g.batch; ++b) {
    const T* xb = x.data() + b * g.in_len * g.in_ch;
    for (std::size_t i = 0; i < g.out_len; ++i) {
      T* row = cols.data() + (b * g.out_len + i) * g.taps * g.in_ch;
      const std::ptrdiff_t start =
          static_cast<std::ptrdiff_t>(i * g.stride) - static_cast<std::ptrdiff_t>(g.pad);
      for (std::size_t j = 0; j < g.taps; ++j) {
        const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(j);
        if (t < 0 || t >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
        std::copy_n(xb + static_cast<std::size_t>(t) * g.in_ch, g.in_ch, row + j * g.in_ch);
      }
    }
  }
  return cols;
}

// Scatter-add adjoint of im2col.
template <typename T>
void col2im(const RowMat<T>& cols, const ConvGeometry& g, std::span<T> x) {
  for (std::size_t b = 0; b < g.batch; ++b) {
    T* xb = x.data() + b * g.in_len * g.in_ch;
    for (std::size_t i = 0; i < g.out_len; ++i) {
      const T* row = cols.data() + (b * g.out_len + i) * g.taps * g.in_ch;
      const std::ptrdiff_t start =
          static_cast<std::ptrdiff_t>(i * g.stride) - static_cast<std::ptrdiff_t>(g.pad);
      for (std::size_t j = 0; j < g.taps; ++j) {
        const std::ptrdiff_t t = start + static_cast<std::ptrdiff_t>(j);
        if (t < 0 || t >= static_cast<std::ptrdiff_t>(g.in_len)) continue;
        T* dst = xb + static_cast<std::size_t>(t) * g.in_ch;
        const T* src = row + j * g.in_ch;
        for (std::size_t c = 0; c < g.in_ch; ++c) dst[c] += src[c];
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> matmul(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b, bool transpose_a,
                 bool transpose_b) {
  detail::require_rank("matmul", "a", a.shape(), 2);
  detail::require_rank("matmul", "b", b.shape(), 2);
  const std::size_t m = transpose_a ? a.dim(1) : a.dim(0);
  const std::size_t ka = transpose_a ? a.dim(0) : a.dim(1);
  const std::size_t kb = transpose_b ? b.dim(1) : b.dim(0);
  const std::size_t n = transpose_b ? b.dim(0) : b.dim(1);
  if (ka != kb) {
    throw DimensionError("matmul: inner dimensions of " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()) + " do not agree");
  }
  Tensor<T> out(Shape{m, n});
  auto A = as_matrix(a, a.dim(0), a.dim(1));
  auto B = as_matrix(b, b.dim(0), b.dim(1));
  auto C = as_matrix(out, m, n);
  if (!transpose_a && !transpose_b) {
    C.noalias() = A * B;
  } else if (transpose_a && !transpose_b) {
    C.noalias() = A.transpose() * B;
  } else if (!transpose_a && transpose_b) {
    C.noalias() = A * B.transpose();
  } else {
    C.noalias() = A.transpose() * B.transpose();
  }
  return g.record(
      "matmul", out, {a, b},
      [a, b, transpose_a, transpose_b](Graph<T>& g, const Tensor<T>& gout,
                                       const std::vector<bool>& needs) {
        Tensor<T> ga, gb;
        if (!transpose_a && !transpose_b) {
          if (needs[0]) ga = matmul(g, gout, b, false, true);
          if (needs[1]) gb = matmul(g, a, gout, true, false);
        } else if (transpose_a && !transpose_b) {
          if (needs[0]) ga = matmul(g, b, gout, false, true);
          if (needs[1]) gb = matmul(g, a, gout, false, false);
        } else if (!transpose_a && transpose_b) {
          if (needs[0]) ga = matmul(g, gout, b, false, false);
          if (needs[1]) gb = matmul(g, gout, a, true, false);
        } else {
          if (needs[0]) ga = matmul(g, b, gout, true, true);
          if (needs[1]) gb = matmul(g, gout, a, true, true);
        }
        return Grads<T>{ga, gb};
      });
}

template <typename T>
Tensor<T> add_bias(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& b) {
  detail::require_rank("add_bias", "bias", b.shape(), 1);
  const std::size_t m = b.dim(0);
  if (x.shape().back() != m) {
    throw DimensionError("add_bias: bias " + shape_str(b.shape()) + " does not match last axis of " +
                         shape_str(x.shape()));
  }
  Tensor<T> out(x.shape());
  auto src = x.values();
  auto bias = b.values();
  auto dst = out.mutable_values();
  const std::size_t rows = x.numel() / m;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < m; ++j) dst[r * m + j] = src[r * m + j] + bias[j];
  }
  return g.record("add_bias", out, {x, b},
                  [rows, m](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>& needs) {
                    Tensor<T> gb;
                    if (needs[1]) gb = sum_axis(g, reshape(g, gout, Shape{rows, m}), 0);
                    return Grads<T>{gout, gb};
                  });
}

template <typename T>
Tensor<T> dense(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  return add_bias(g, matmul(g, x, w), b);
}

template <typename T>
Tensor<T> conv1d(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, std::size_t stride) {
  const ConvGeometry geo = conv_geometry("conv1d", x.shape(), w.shape(), stride);
  Tensor<T> out(Shape{geo.batch, geo.out_len, geo.out_ch});
  const RowMat<T> cols = im2col(x.values(), geo);
  as_matrix(out, geo.batch * geo.out_len, geo.out_ch).noalias() =
      cols * as_matrix(w, geo.taps * geo.in_ch, geo.out_ch);
  return g.record("conv1d", out, {x, w},
                  [x, w, stride](Graph<T>& g, const Tensor<T>& gout,
                                 const std::vector<bool>& needs) {
                    return Grads<T>{
                        needs[0] ? conv1d_input_grad(g, gout, w, stride) : Tensor<T>(),
                        needs[1] ? conv1d_weight_grad(g, x, gout, stride, w.dim(0)) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> conv1d_input_grad(Graph<T>& g, const Tensor<T>& grad_out, const Tensor<T>& w,
                            std::size_t stride) {
  detail::require_rank("conv1d_input_grad", "grad_out", grad_out.shape(), 3);
  detail::require_rank("conv1d_input_grad", "kernel", w.shape(), 3);
  if (grad_out.dim(2) != w.dim(2)) {
    throw DimensionError("conv1d_input_grad: " + shape_str(grad_out.shape()) +
                         " has wrong channel count for kernel " + shape_str(w.shape()));
  }
  const Shape x_shape{grad_out.dim(0), grad_out.dim(1) * stride, w.dim(1)};
  const ConvGeometry geo = conv_geometry("conv1d_input_grad", x_shape, w.shape(), stride);
  const RowMat<T> cols = as_matrix(grad_out, geo.batch * geo.out_len, geo.out_ch) *
                         as_matrix(w, geo.taps * geo.in_ch, geo.out_ch).transpose();
  Tensor<T> out(x_shape);
  col2im(cols, geo, out.mutable_values());
  return g.record("conv1d_input_grad", out, {grad_out, w},
                  [grad_out, w, stride](Graph<T>& g, const Tensor<T>& gin,
                                        const std::vector<bool>& needs) {
                    return Grads<T>{
                        needs[0] ? conv1d(g, gin, w, stride) : Tensor<T>(),
                        needs[1] ? conv1d_weight_grad(g, gin, grad_out, stride, w.dim(0))
                                 : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> conv1d_weight_grad(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& grad_out,
                             std::size_t stride, std::size_t taps) {
  detail::require_rank("conv1d_weight_grad", "grad_out", grad_out.shape(), 3);
  const Shape w_shape{taps, x.shape().at(2), grad_out.dim(2)};
  const ConvGeometry geo = conv_geometry("conv1d_weight_grad", x.shape(), w_shape, stride);
  if (grad_out.dim(0) != geo.batch || grad_out.dim(1) != geo.out_len) {
    throw DimensionError("conv1d_weight_grad: grad_out " + shape_str(grad_out.shape()) +
                         " does not match input " + shape_str(x.shape()));
  }
  const RowMat<T> cols = im2col(x.values(), geo);
  Tensor<T> out(w_shape);
  as_matrix(out, taps * geo.in_ch, geo.out_ch).noalias() =
      cols.transpose() * as_matrix(grad_out, geo.batch * geo.out_len, geo.out_ch);
  return g.record("conv1d_weight_grad", out, {x, grad_out},
                  [x, grad_out, stride](Graph<T>& g, const Tensor<T>& gw,
                                        const std::vector<bool>& needs) {
                    return Grads<T>{
                        needs[0] ? conv1d_input_grad(g, grad_out, gw, stride) : Tensor<T>(),
                        needs[1] ? conv1d(g, x, gw, stride) : Tensor<T>()};
                  });
}

template <typename T>
Tensor<T> swap_io(Graph<T>& g, const Tensor<T>& w) {
  detail::require_rank("swap_io", "kernel", w.shape(), 3);
  const std::size_t k = w.dim(0), a = w.dim(1), b = w.dim(2);
  Tensor<T> out(Shape{k, b, a});
  auto src = w.values();
  auto dst = out.mutable_values();
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t p = 0; p < a; ++p) {
      for (std::size_t q = 0; q < b; ++q) dst[(j * b + q) * a + p] = src[(j * a + p) * b + q];
    }
  }
  return g.record("swap_io", out, {w},
                  [](Graph<T>& g, const Tensor<T>& gout, const std::vector<bool>&) {
                    return Grads<T>{swap_io(g, gout)};
                  });
}

template <typename T>
Tensor<T> trans_conv1d(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, std::size_t stride) {
  detail::require_rank("trans_conv1d", "input", x.shape(), 3);
  detail::require_rank("trans_conv1d", "kernel", w.shape(), 3);
  if (w.dim(1) != x.dim(2)) {
    throw DimensionError("trans_conv1d: kernel " + shape_str(w.shape()) + " expects " +
                         std::to_string(w.dim(1)) + " input channels, input is " +
                         shape_str(x.shape()));
  }
  return conv1d_input_grad(g, x, swap_io(g, w), stride);
}

#define CWAVEGAN_LINEAR_OPS(T)                                                                   \
  template Tensor<T> matmul<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&, bool, bool);       \
  template Tensor<T> add_bias<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> dense<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);  \
  template Tensor<T> conv1d<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t);      \
  template Tensor<T> conv1d_input_grad<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&,         \
                                          std::size_t);                                          \
  template Tensor<T> conv1d_weight_grad<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                           std::size_t, std::size_t);                            \
  template Tensor<T> swap_io<T>(Graph<T>&, const Tensor<T>&);                                    \
  template Tensor<T> trans_conv1d<T>(Graph<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t);

CWAVEGAN_INSTANTIATE(CWAVEGAN_LINEAR_OPS)

}  // namespace cwavegan::ops
