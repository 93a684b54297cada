// Copyright (c) 2026 The tripoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dynamic reverse-mode differentiation. A Graph records nodes in creation
// order, which is a topological order; backward walks it in reverse. Graphs
// are rebuilt every forward pass and are confined to one thread.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tripoint::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

// Persistent trainable tensor. Lives outside any graph.
template <typename T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until the first backward pass reaches it

  std::size_t size() const { return value.size(); }
};

// Owns parameters in registration order with stable addresses.
template <typename T>
class ParameterStore {
 public:
  Parameter<T>& add(std::string name, Shape shape, std::vector<T> value);
  Parameter<T>* find(const std::string& name);
  const Parameter<T>* find(const std::string& name) const;

  std::vector<Parameter<T>*> all();
  std::vector<const Parameter<T>*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t total_elements() const;

  void zero_grad();

 private:
  std::deque<Parameter<T>> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

enum class OpKind {
  kInput,
  kParameter,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddScalar,
  kConcat,
  kSlice,
  kReshape,
  kTranspose,
  kRelu,
  kSoftmax,
  kLayerNorm,
  kMaxReduce,
  kMinReduce,
  kMeanReduce,
  kSum,
  kGatherRows,
  kExp,
  kLog,
  kSqrt,
  kArcosh1p,
  kSin,
  kCos,
  kPairwiseSqdist,
  kConv2d,
  kChamfer,
};

template <typename T>
class Graph;

template <typename T>
struct Node {
  using Backward = std::function<void(Graph<T>&, const Node<T>&)>;

  OpKind op = OpKind::kInput;
  std::vector<std::size_t> inputs;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  Parameter<T>* param = nullptr;
  Backward backward;
};

// Handle to a node of a graph. Cheap to copy; valid while the graph lives.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(Graph<T>* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph<T>& graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  const Node<T>& node() const;

  const Shape& shape() const { return node().shape; }
  std::size_t dim(std::size_t axis) const { return shape().at(axis); }
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const { return node().value.size(); }
  std::span<const T> value() const { return node().value; }
  std::span<const T> grad() const { return node().grad; }
  T item() const;
  bool requires_grad() const { return node().requires_grad; }

 private:
  Graph<T>* graph_ = nullptr;
  std::size_t id_ = 0;
};

template <typename T>
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Constant leaf (no gradient).
  Tensor<T> input(Shape shape, std::vector<T> value);
  // Trainable leaf; one node per parameter regardless of how often it is used.
  Tensor<T> param(Parameter<T>& p);

  Tensor<T> push(OpKind op, std::vector<std::size_t> inputs, Shape shape, std::vector<T> value,
                 typename Node<T>::Backward backward);

  const Node<T>& node(std::size_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of a node, allocated zeroed on first use.
  std::vector<T>& grad_buffer(std::size_t id);
  bool needs_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Reverse sweep from a scalar loss. Parameter gradients accumulate into
  // Parameter::grad; the caller zeroes them between steps.
  void backward(const Tensor<T>& loss);

  // Times each node's backward rule ran during the last backward().
  const std::vector<std::uint32_t>& backward_calls() const { return backward_calls_; }

  // Discrete choices of the forward pass. ReLU masks and max/min picks are
  // logged and can be replayed: a graph replaying the log of an earlier pass
  // of the same computation reuses those choices, so it evaluates the smooth
  // piece that was active at the logged point. Gathered indices come from
  // outside the graph; they are hashed into a signature instead.
  using DecisionLog = std::vector<std::vector<std::size_t>>;
  void record_decisions(DecisionLog* log) { record_ = log; }
  void replay_decisions(const DecisionLog* log) {
    replay_ = log;
    cursor_ = 0;
  }
  bool replaying() const { return replay_ != nullptr; }
  // Next logged choice when replaying, else nullptr.
  const std::vector<std::size_t>* next_replayed();
  void log_choice(const std::vector<std::size_t>& choice);

  void set_track_decisions(bool on) { track_decisions_ = on; }
  bool tracking_decisions() const { return track_decisions_; }
  void record_decision(std::span<const std::size_t> choices);
  std::uint64_t decision_signature() const { return signature_; }

 private:
  std::vector<Node<T>> nodes_;
  std::unordered_map<const Parameter<T>*, std::size_t> param_nodes_;
  std::vector<std::uint32_t> backward_calls_;
  bool track_decisions_ = false;
  DecisionLog* record_ = nullptr;
  const DecisionLog* replay_ = nullptr;
  std::size_t cursor_ = 0;
  std::uint64_t signature_ = 0xcbf29ce484222325ULL;
};

template <typename T>
const Node<T>& Tensor<T>::node() const {
  return graph_->node(id_);
}

}  // namespace tripoint::ad
