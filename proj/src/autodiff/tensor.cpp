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

#include "tripoint/autodiff/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "tripoint/error.hpp"

namespace tripoint::ad {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ")";
  return os.str();
}

template <typename T>
Parameter<T>& ParameterStore<T>::add(std::string name, Shape shape, std::vector<T> value) {
  if (value.size() != numel(shape)) {
    throw Error(ErrorCode::kShapeMismatch, name + ": value size does not match " + shape_string(shape));
  }
  if (by_name_.count(name) != 0) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate parameter " + name);
  }
  by_name_.emplace(name, params_.size());
  params_.push_back(Parameter<T>{std::move(name), std::move(shape), std::move(value), {}});
  return params_.back();
}

template <typename T>
Parameter<T>* ParameterStore<T>::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

template <typename T>
const Parameter<T>* ParameterStore<T>::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

template <typename T>
std::vector<Parameter<T>*> ParameterStore<T>::all() {
  std::vector<Parameter<T>*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> ParameterStore<T>::all() const {
  std::vector<const Parameter<T>*> out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
std::size_t ParameterStore<T>::total_elements() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

template <typename T>
void ParameterStore<T>::zero_grad() {
  for (auto& p : params_) p.grad.assign(p.value.size(), T(0));
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) {
    throw Error(ErrorCode::kNotScalarLoss, "item() on shape " + shape_string(shape()));
  }
  return value()[0];
}

template <typename T>
Tensor<T> Graph<T>::input(Shape shape, std::vector<T> value) {
  if (value.size() != numel(shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                "input of " + std::to_string(value.size()) + " values for " + shape_string(shape));
  }
  Node<T> n;
  n.op = OpKind::kInput;
  n.shape = std::move(shape);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
Tensor<T> Graph<T>::param(Parameter<T>& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
    return Tensor<T>(this, it->second);
  }
  Node<T> n;
  n.op = OpKind::kParameter;
  n.shape = p.shape;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
Tensor<T> Graph<T>::push(OpKind op, std::vector<std::size_t> inputs, Shape shape,
                         std::vector<T> value, typename Node<T>::Backward backward) {
  Node<T> n;
  n.op = op;
  n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                [this](std::size_t id) { return nodes_[id].requires_grad; });
  n.inputs = std::move(inputs);
  n.shape = std::move(shape);
  n.value = std::move(value);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Tensor<T>(this, nodes_.size() - 1);
}

template <typename T>
std::vector<T>& Graph<T>::grad_buffer(std::size_t id) {
  auto& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), T(0));
  return n.grad;
}

template <typename T>
void Graph<T>::backward(const Tensor<T>& loss) {
  if (&loss.graph() != this) throw Error(ErrorCode::kShapeMismatch, "loss from another graph");
  if (loss.size() != 1) {
    throw Error(ErrorCode::kNotScalarLoss, "loss has shape " + shape_string(loss.shape()));
  }
  backward_calls_.assign(nodes_.size(), 0);
  for (auto& n : nodes_) n.grad.clear();
  grad_buffer(loss.id())[0] = T(1);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const Node<T>& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.param != nullptr) {
      auto& pg = n.param->grad;
      if (pg.empty()) pg.assign(n.value.size(), T(0));
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
      ++backward_calls_[id];
    } else if (n.backward) {
      n.backward(*this, n);
      ++backward_calls_[id];
    }
  }
}

template <typename T>
void Graph<T>::record_decision(std::span<const std::size_t> choices) {
  if (!track_decisions_) return;
  for (auto c : choices) {
    signature_ ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL;
    signature_ *= 0x100000001b3ULL;
  }
}

template <typename T>
const std::vector<std::size_t>* Graph<T>::next_replayed() {
  if (replay_ == nullptr) return nullptr;
  if (cursor_ >= replay_->size()) {
    throw Error(ErrorCode::kShapeMismatch, "decision replay ran past the end of its log");
  }
  return &(*replay_)[cursor_++];
}

template <typename T>
void Graph<T>::log_choice(const std::vector<std::size_t>& choice) {
  if (record_ != nullptr) record_->push_back(choice);
}

template struct Parameter<float>;
template struct Parameter<double>;
template class ParameterStore<float>;
template class ParameterStore<double>;
template class Tensor<float>;
template class Tensor<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace tripoint::ad
