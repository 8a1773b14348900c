#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwavegan/errors.hpp"

namespace cwavegan {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
class Graph;

/// Dense row-major array of reals that can take part in an autodiff graph.
///
/// A Tensor is a reference-counted handle: copies share storage. Values are
/// treated as immutable once produced by an op; only parameters are mutated,
/// between training steps, through mutable_values().
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape shape, bool requires_grad = false)
      : impl_(std::make_shared<Impl>()) {
    check_shape(shape);
    impl_->values.assign(shape_numel(shape), T(0));
    impl_->shape = std::move(shape);
    impl_->requires_grad = requires_grad;
  }

  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false)
      : impl_(std::make_shared<Impl>()) {
    check_shape(shape);
    if (shape_numel(shape) != values.size()) {
      throw DimensionError("tensor shape " + shape_str(shape) + " holds " +
                           std::to_string(shape_numel(shape)) + " values, got " +
                           std::to_string(values.size()));
    }
    impl_->shape = std::move(shape);
    impl_->values = std::move(values);
    impl_->requires_grad = requires_grad;
  }

  static Tensor full(Shape shape, T value) {
    Tensor t(std::move(shape));
    std::fill(t.impl_->values.begin(), t.impl_->values.end(), value);
    return t;
  }

  static Tensor scalar(T value) { return Tensor(Shape{1}, std::vector<T>{value}); }

  bool defined() const noexcept { return impl_ != nullptr; }

  const Shape& shape() const { return impl().shape; }
  std::size_t rank() const { return impl().shape.size(); }
  std::size_t dim(std::size_t axis) const { return impl().shape.at(axis); }
  std::size_t numel() const { return impl().values.size(); }

  std::span<const T> values() const { return impl().values; }
  std::span<T> mutable_values() { return impl().values; }

  T item() const {
    if (numel() != 1) {
      throw ContractError("item() on tensor of shape " + shape_str(shape()));
    }
    return impl().values[0];
  }

  T at(std::initializer_list<std::size_t> index) const {
    const Shape& s = shape();
    if (index.size() != s.size()) {
      throw DimensionError("index rank mismatch for shape " + shape_str(s));
    }
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : index) {
      if (i >= s[axis]) throw DimensionError("index out of range for shape " + shape_str(s));
      flat = flat * s[axis] + i;
      ++axis;
    }
    return impl().values[flat];
  }

  bool requires_grad() const { return impl().requires_grad; }
  void set_requires_grad(bool on) { impl().requires_grad = on; }

  /// Accumulated gradient; undefined until a backward pass reaches this leaf.
  Tensor grad() const {
    Tensor g;
    g.impl_ = impl().grad;
    return g;
  }

  void zero_grad() { impl().grad.reset(); }

  void accumulate_grad(const Tensor& g) {
    if (g.shape() != shape()) {
      throw DimensionError("gradient shape " + shape_str(g.shape()) + " does not match " +
                           shape_str(shape()));
    }
    if (!impl().grad) {
      impl().grad = std::make_shared<Impl>();
      impl().grad->shape = shape();
      impl().grad->values.assign(g.values().begin(), g.values().end());
      return;
    }
    auto& dst = impl().grad->values;
    auto src = g.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }

  /// Copy of the values with no graph binding and requires_grad == false.
  Tensor detach() const {
    return Tensor(shape(), std::vector<T>(values().begin(), values().end()));
  }

  bool same_storage(const Tensor& other) const noexcept { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<T> values;
    bool requires_grad = false;
    std::shared_ptr<Impl> grad;
    std::uint64_t graph_id = 0;  // graph that produced this tensor, 0 if none
    int node = -1;
  };

  static void check_shape(const Shape& shape) {
    if (shape.empty()) throw DimensionError("tensor shape must have at least one axis");
    for (std::size_t d : shape) {
      if (d == 0) throw DimensionError("tensor shape " + shape_str(shape) + " has a zero axis");
    }
  }

  Impl& impl() const {
    if (!impl_) throw ContractError("use of undefined tensor");
    return *impl_;
  }

  std::shared_ptr<Impl> impl_;

  friend class Graph<T>;
};

}  // namespace cwavegan
