#include "cwavegan/graph.hpp"

#include <atomic>
#include <optional>

#include "cwavegan/ops.hpp"

namespace cwavegan {

namespace {
std::atomic<std::uint64_t> next_graph_id{1};
}

template <typename T>
Graph<T>::Graph(bool recording) : id_(next_graph_id.fetch_add(1)), recording_(recording) {}

template <typename T>
int Graph<T>::node_of(const Tensor<T>& t) const {
  if (!t.defined()) return -1;
  if (t.impl_->graph_id == id_) return t.impl_->node;
  auto it = leaf_index_.find(t.impl_.get());
  return it == leaf_index_.end() ? -1 : it->second;
}

template <typename T>
int Graph<T>::bind(const Tensor<T>& t) {
  if (int id = node_of(t); id >= 0) return id;
  if (!t.defined() || !t.requires_grad()) return -1;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{"leaf", {}, t, {}});
  leaf_index_.emplace(t.impl_.get(), id);
  leaf_nodes_.push_back(id);
  return id;
}

template <typename T>
Tensor<T> Graph<T>::record(std::string_view kind, Tensor<T> output,
                           std::initializer_list<Tensor<T>> inputs, BackwardFn<T> backward) {
  if (!recording_) return output;
  std::vector<int> ids;
  ids.reserve(inputs.size());
  bool any = false;
  for (const Tensor<T>& in : inputs) {
    ids.push_back(bind(in));
    any = any || ids.back() >= 0;
  }
  if (!any) return output;
  const int id = static_cast<int>(nodes_.size());
  output.impl_->graph_id = id_;
  output.impl_->node = id;
  output.impl_->requires_grad = true;
  nodes_.push_back(Node{kind, std::move(ids), output, std::move(backward)});
  return output;
}

template <typename T>
std::vector<Tensor<T>> Graph<T>::gradient(const Tensor<T>& output,
                                          const std::vector<Tensor<T>>& wrt, bool create_graph,
                                          const Tensor<T>& seed) {
  const int out = node_of(output);
  if (out < 0) throw ContractError("gradient: output tensor is not recorded on this graph");
  std::vector<int> targets;
  targets.reserve(wrt.size());
  for (const Tensor<T>& w : wrt) {
    const int id = node_of(w);
    if (id < 0) throw ContractError("gradient: input tensor is not on this graph");
    targets.push_back(id);
  }

  const std::size_t count = static_cast<std::size_t>(out) + 1;
  std::vector<char> is_target(count, 0);
  std::vector<char> needed(count, 0);
  for (int t : targets) {
    if (t <= out) needed[t] = is_target[t] = 1;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (needed[i]) continue;
    for (int in : nodes_[i].inputs) {
      if (in >= 0 && needed[in]) {
        needed[i] = 1;
        break;
      }
    }
  }

  std::vector<Tensor<T>> grads(count);
  if (seed.defined()) {
    if (seed.shape() != output.shape()) {
      throw DimensionError("gradient seed shape " + shape_str(seed.shape()) +
                           " does not match output " + shape_str(output.shape()));
    }
    grads[out] = seed;
  } else {
    grads[out] = Tensor<T>::full(output.shape(), T(1));
  }

  std::optional<Pause> pause;
  if (!create_graph) pause.emplace(*this);

  for (int i = out; i >= 0; --i) {
    if (!needed[i] || !grads[i].defined()) continue;
    // std::deque keeps references stable while backward appends nodes.
    const Node& node = nodes_[i];
    if (!node.backward) continue;
    std::vector<bool> needs(node.inputs.size());
    bool any = false;
    for (std::size_t k = 0; k < needs.size(); ++k) {
      needs[k] = node.inputs[k] >= 0 && needed[node.inputs[k]];
      any = any || needs[k];
    }
    if (!any) continue;
    std::vector<Tensor<T>> in_grads = node.backward(*this, grads[i], needs);
    if (!is_target[i]) grads[i] = Tensor<T>();
    for (std::size_t k = 0; k < needs.size(); ++k) {
      if (!needs[k] || k >= in_grads.size() || !in_grads[k].defined()) continue;
      Tensor<T>& slot = grads[node.inputs[k]];
      slot = slot.defined() ? ops::add(*this, slot, in_grads[k]) : in_grads[k];
    }
  }

  std::vector<Tensor<T>> result;
  result.reserve(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const int t = targets[k];
    if (t <= out && grads[t].defined()) {
      result.push_back(grads[t]);
    } else {
      result.push_back(Tensor<T>(wrt[k].shape()));
    }
  }
  return result;
}

template <typename T>
void Graph<T>::backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  }
  std::vector<Tensor<T>> leaves;
  leaves.reserve(leaf_nodes_.size());
  for (int id : leaf_nodes_) leaves.push_back(nodes_[id].output);
  if (leaves.empty()) return;
  std::vector<Tensor<T>> grads = gradient(loss, leaves, false);
  for (std::size_t k = 0; k < leaves.size(); ++k) leaves[k].accumulate_grad(grads[k]);
}

template class Graph<float>;
template class Graph<double>;

}  // namespace cwavegan
