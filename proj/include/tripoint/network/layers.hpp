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

// Trainable building blocks. Each layer registers its parameters in a store
// at construction and is stateless afterwards, so a const layer can be
// applied to any graph.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tripoint/autodiff/ops.hpp"
#include "tripoint/autodiff/tensor.hpp"

namespace tripoint::net {

using ad::Graph;
using ad::Parameter;
using ad::ParameterStore;
using ad::Shape;
using ad::Tensor;

// Values drawn uniformly from [-bound, bound] by a stream derived from the
// model seed and the parameter name, so registration order never matters.
template <typename T>
Parameter<T>& add_uniform(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                          Shape shape, double bound);
template <typename T>
Parameter<T>& add_constant(ParameterStore<T>& store, const std::string& name, Shape shape,
                           double value);

template <typename T>
class Linear {
 public:
  Linear() = default;
  // `gain` scales the default 1/sqrt(in) init bound.
  Linear(ParameterStore<T>& store, std::uint64_t seed, const std::string& name, std::size_t in,
         std::size_t out, double gain = 1.0, bool bias = true);

  Tensor<T> operator()(const Tensor<T>& x) const;  // (n, in) -> (n, out)

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  Parameter<T>* weight() const { return weight_; }
  Parameter<T>* bias() const { return bias_; }

 private:
  Parameter<T>* weight_ = nullptr;  // (in, out)
  Parameter<T>* bias_ = nullptr;    // (out)
  std::size_t in_ = 0;
  std::size_t out_ = 0;
};

// Linear layers with ReLU between them (none after the last).
template <typename T>
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
      const std::vector<std::size_t>& widths, double last_gain = 1.0);

  Tensor<T> operator()(const Tensor<T>& x) const;
  const std::vector<Linear<T>>& layers() const { return layers_; }

 private:
  std::vector<Linear<T>> layers_;
};

template <typename T>
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterStore<T>& store, const std::string& name, std::size_t dim);
  Tensor<T> operator()(const Tensor<T>& x) const;

 private:
  Parameter<T>* gamma_ = nullptr;
  Parameter<T>* beta_ = nullptr;
};

template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                     std::size_t width, std::size_t heads);

  // query (n, width) attends over context (m, width).
  Tensor<T> operator()(const Tensor<T>& query, const Tensor<T>& context) const;

 private:
  Linear<T> q_, k_, v_, o_;
  std::size_t width_ = 0;
  std::size_t heads_ = 1;
};

// Pre-norm transformer block: attention then a 2x-wide MLP, each residual.
template <typename T>
class AttentionBlock {
 public:
  AttentionBlock() = default;
  AttentionBlock(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                 std::size_t width, std::size_t heads, bool cross);

  Tensor<T> operator()(const Tensor<T>& x) const;  // self attention
  Tensor<T> operator()(const Tensor<T>& x, const Tensor<T>& context) const;

 private:
  LayerNorm<T> norm_q_, norm_kv_, norm_mlp_;
  MultiHeadAttention<T> attn_;
  Mlp<T> mlp_;
  bool cross_ = false;
};

// Square-kernel image convolution over a (Cin, H, W) tensor.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParameterStore<T>& store, std::uint64_t seed, const std::string& name, std::size_t in,
         std::size_t out, std::size_t kernel, std::size_t stride);

  Tensor<T> operator()(const Tensor<T>& x) const;

 private:
  Parameter<T>* weight_ = nullptr;
  Parameter<T>* bias_ = nullptr;
  std::size_t kernel_ = 3;
  std::size_t stride_ = 1;
};

}  // namespace tripoint::net
