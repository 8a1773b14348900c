#pragma once

#include <cstddef>
#include <span>

#include "cwavegan/graph.hpp"
#include "cwavegan/tensor.hpp"

// Differentiable tensor operations. Every op records itself on the graph it
// is given (when the graph is recording) and its backward is written in terms
// of other ops from this header, so gradients can be differentiated again.
//
// Layout is channels-last: sequences are (batch, length, channels) and conv
// kernels are (taps, in_channels, out_channels).
namespace cwavegan::ops {

enum class Activation { relu, leaky_relu, tanh, sigmoid };

inline constexpr double kLeakySlope = 0.2;

// Elementwise. Binary ops require identical shapes.
template <typename T> Tensor<T> add(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> div(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(Graph<T>& g, const Tensor<T>& x, T factor);
template <typename T> Tensor<T> add_scalar(Graph<T>& g, const Tensor<T>& x, T offset);
template <typename T> Tensor<T> square(Graph<T>& g, const Tensor<T>& x);
template <typename T> Tensor<T> sqrt(Graph<T>& g, const Tensor<T>& x);
// 1/x, with 0 where x == 0.
template <typename T> Tensor<T> reciprocal(Graph<T>& g, const Tensor<T>& x);

template <typename T> Tensor<T> relu(Graph<T>& g, const Tensor<T>& x);
template <typename T> Tensor<T> leaky_relu(Graph<T>& g, const Tensor<T>& x, T slope);
template <typename T> Tensor<T> tanh(Graph<T>& g, const Tensor<T>& x);
template <typename T> Tensor<T> sigmoid(Graph<T>& g, const Tensor<T>& x);
// log(1 + exp(x)), overflow-free.
template <typename T> Tensor<T> softplus(Graph<T>& g, const Tensor<T>& x);
template <typename T> Tensor<T> activation(Graph<T>& g, const Tensor<T>& x, Activation kind);

// Reductions and broadcasts.
template <typename T> Tensor<T> sum(Graph<T>& g, const Tensor<T>& x);   // -> (1)
template <typename T> Tensor<T> mean(Graph<T>& g, const Tensor<T>& x);  // -> (1)
// Sum over every axis but the first: (n, ...) -> (n).
template <typename T> Tensor<T> row_sum(Graph<T>& g, const Tensor<T>& x);
// Removes `axis` by summation.
template <typename T> Tensor<T> sum_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis);
// Inserts a new axis of length `size` at `axis`, replicating values.
template <typename T>
Tensor<T> expand_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t size);
// Broadcasts a one-element tensor to `shape`.
template <typename T> Tensor<T> fill(Graph<T>& g, const Tensor<T>& scalar, const Shape& shape);

template <typename T> Tensor<T> reshape(Graph<T>& g, const Tensor<T>& x, const Shape& shape);

// Concatenation along `axis`. An undefined tensor acts as an empty operand.
template <typename T>
Tensor<T> concat(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b, std::size_t axis);
template <typename T>
Tensor<T> slice(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t begin,
                std::size_t length);
// Embeds x at [begin, begin + x.dim(axis)) of a zero tensor with `size` along axis.
template <typename T>
Tensor<T> pad_axis(Graph<T>& g, const Tensor<T>& x, std::size_t axis, std::size_t begin,
                   std::size_t size);

// Linear algebra.
template <typename T>
Tensor<T> matmul(Graph<T>& g, const Tensor<T>& a, const Tensor<T>& b, bool transpose_a = false,
                 bool transpose_b = false);
// x (..., m) + b (m)
template <typename T> Tensor<T> add_bias(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& b);
// x (n, k) . w (k, m) + b (m)
template <typename T>
Tensor<T> dense(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

// Strided cross-correlation. Output tap i reads input samples
// [i*stride - (k-1)/2, i*stride - (k-1)/2 + k), zero outside the signal, so the
// output length is exactly L / stride. L must be divisible by stride.
template <typename T>
Tensor<T> conv1d(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, std::size_t stride);
// Adjoint of conv1d with respect to its input: (n, L, c_out) -> (n, L*stride, c_in).
template <typename T>
Tensor<T> conv1d_input_grad(Graph<T>& g, const Tensor<T>& grad_out, const Tensor<T>& w,
                            std::size_t stride);
// Adjoint of conv1d with respect to its kernel: -> (taps, c_in, c_out).
template <typename T>
Tensor<T> conv1d_weight_grad(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& grad_out,
                             std::size_t stride, std::size_t taps);
// (k, a, b) -> (k, b, a)
template <typename T> Tensor<T> swap_io(Graph<T>& g, const Tensor<T>& w);
// Fractionally strided convolution, x (n, L, c_in), w (k, c_in, c_out)
// -> (n, L*stride, c_out). Equal to conv1d_input_grad with swap_io(w).
template <typename T>
Tensor<T> trans_conv1d(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& w, std::size_t stride);

// x (n, L, c) * s (n, c), broadcast over L.
template <typename T>
Tensor<T> scale_channels(Graph<T>& g, const Tensor<T>& x, const Tensor<T>& s);

// Constant (n, classes) one-hot matrix.
template <typename T>
Tensor<T> one_hot(std::span<const int> labels, std::size_t classes);

}  // namespace cwavegan::ops
