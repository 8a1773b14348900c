#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cwavegan/tensor.hpp"

namespace cwavegan {

/// Computes input gradients of one recorded op. `needs[k]` tells whether the
/// gradient for input k is wanted; entries that are not wanted may be left
/// undefined. When the graph is recording, the returned tensors are
/// themselves recorded, which is what makes second-order gradients work.
template <typename T>
using BackwardFn = std::function<std::vector<Tensor<T>>(
    Graph<T>& graph, const Tensor<T>& grad_out, const std::vector<bool>& needs)>;

/// Reverse-mode tape. Ops append nodes in execution order, so the node list
/// is always topologically sorted.
///
/// A tensor that requires grad but was not produced on this graph becomes a
/// leaf the first time an op consumes it. Tensors that neither require grad
/// nor live on the graph are constants and get no node.
template <typename T>
class Graph {
 public:
  struct Node {
    std::string_view kind;
    std::vector<int> inputs;  // node ids, -1 for constants
    Tensor<T> output;
    BackwardFn<T> backward;  // empty for leaves
  };

  explicit Graph(bool recording = true);
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool recording() const noexcept { return recording_; }

  /// Suspends recording for its lifetime.
  class Pause {
   public:
    explicit Pause(Graph& graph) : graph_(graph), previous_(graph.recording_) {
      graph.recording_ = false;
    }
    ~Pause() { graph_.recording_ = previous_; }
    Pause(const Pause&) = delete;
    Pause& operator=(const Pause&) = delete;

   private:
    Graph& graph_;
    bool previous_;
  };

  /// Records `output` as the result of `kind` applied to `inputs`. Returns
  /// `output`, bound to this graph when at least one input is differentiable.
  Tensor<T> record(std::string_view kind, Tensor<T> output,
                   std::initializer_list<Tensor<T>> inputs, BackwardFn<T> backward);

  bool contains(const Tensor<T>& t) const { return node_of(t) >= 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<int>& leaves() const noexcept { return leaf_nodes_; }

  /// d(seed . output)/d(wrt). `seed` defaults to all ones. With
  /// `create_graph` the gradient computation is recorded on this graph, so
  /// the results can be differentiated again.
  std::vector<Tensor<T>> gradient(const Tensor<T>& output, const std::vector<Tensor<T>>& wrt,
                                  bool create_graph = false, const Tensor<T>& seed = {});

  /// Accumulates d(loss)/d(leaf) into the .grad of every leaf of this graph.
  void backward(const Tensor<T>& loss);

 private:
  int node_of(const Tensor<T>& t) const;
  int bind(const Tensor<T>& t);

  std::uint64_t id_;
  bool recording_;
  std::deque<Node> nodes_;
  std::unordered_map<const void*, int> leaf_index_;
  std::vector<int> leaf_nodes_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace cwavegan
