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

#include "tripoint/network/layers.hpp"

#include <cmath>

#include "tripoint/error.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::net {

template <typename T>
Parameter<T>& add_uniform(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                          Shape shape, double bound) {
  Rng rng(seed, name);
  std::vector<T> value(ad::numel(shape));
  for (auto& v : value) v = static_cast<T>(rng.uniform(-bound, bound));
  return store.add(name, std::move(shape), std::move(value));
}

template <typename T>
Parameter<T>& add_constant(ParameterStore<T>& store, const std::string& name, Shape shape,
                           double value) {
  std::vector<T> data(ad::numel(shape), static_cast<T>(value));
  return store.add(name, std::move(shape), std::move(data));
}

template <typename T>
Linear<T>::Linear(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                  std::size_t in, std::size_t out, double gain, bool bias)
    : in_(in), out_(out) {
  const double bound = gain / std::sqrt(static_cast<double>(in));
  weight_ = &add_uniform(store, seed, name + ".weight", {in, out}, bound);
  if (bias) bias_ = &add_constant(store, name + ".bias", {out}, 0.0);
}

template <typename T>
Tensor<T> Linear<T>::operator()(const Tensor<T>& x) const {
  auto& g = x.graph();
  if (x.rank() != 2 || x.dim(1) != in_) {
    throw Error(ErrorCode::kShapeMismatch,
                "linear expects (n, " + std::to_string(in_) + "), got " + ad::shape_string(x.shape()));
  }
  auto y = ad::matmul(x, g.param(*weight_));
  if (bias_ != nullptr) y = ad::add(y, g.param(*bias_));
  return y;
}

template <typename T>
Mlp<T>::Mlp(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
            const std::vector<std::size_t>& widths, double last_gain) {
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const bool last = i + 2 == widths.size();
    layers_.emplace_back(store, seed, name + "." + std::to_string(i), widths[i], widths[i + 1],
                         last ? last_gain : 1.0);
  }
}

template <typename T>
Tensor<T> Mlp<T>::operator()(const Tensor<T>& x) const {
  auto y = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    y = layers_[i](y);
    if (i + 1 < layers_.size()) y = ad::relu(y);
  }
  return y;
}

template <typename T>
LayerNorm<T>::LayerNorm(ParameterStore<T>& store, const std::string& name, std::size_t dim) {
  gamma_ = &add_constant(store, name + ".gamma", {dim}, 1.0);
  beta_ = &add_constant(store, name + ".beta", {dim}, 0.0);
}

template <typename T>
Tensor<T> LayerNorm<T>::operator()(const Tensor<T>& x) const {
  auto& g = x.graph();
  return ad::add(ad::mul(ad::layer_norm(x), g.param(*gamma_)), g.param(*beta_));
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(ParameterStore<T>& store, std::uint64_t seed,
                                          const std::string& name, std::size_t width,
                                          std::size_t heads)
    : q_(store, seed, name + ".q", width, width),
      k_(store, seed, name + ".k", width, width),
      v_(store, seed, name + ".v", width, width),
      o_(store, seed, name + ".o", width, width),
      width_(width),
      heads_(heads) {
  if (heads == 0 || width % heads != 0) {
    throw Error(ErrorCode::kInvalidConfig, "heads must divide the attention width");
  }
}

template <typename T>
Tensor<T> MultiHeadAttention<T>::operator()(const Tensor<T>& query,
                                            const Tensor<T>& context) const {
  const auto q = q_(query);
  const auto k = k_(context);
  const auto v = v_(context);
  const std::size_t dh = width_ / heads_;
  const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
  std::vector<Tensor<T>> outs;
  outs.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const auto qh = ad::slice(q, 1, h * dh, dh);
    const auto kh = ad::slice(k, 1, h * dh, dh);
    const auto vh = ad::slice(v, 1, h * dh, dh);
    const auto scores = ad::scale(ad::matmul(qh, ad::transpose(kh)), inv);
    outs.push_back(ad::matmul(ad::softmax(scores), vh));
  }
  const auto merged =
      heads_ == 1 ? outs.front() : ad::concat<T>(std::span<const Tensor<T>>(outs), 1);
  return o_(merged);
}

template <typename T>
AttentionBlock<T>::AttentionBlock(ParameterStore<T>& store, std::uint64_t seed,
                                  const std::string& name, std::size_t width, std::size_t heads,
                                  bool cross)
    : cross_(cross) {
  norm_q_ = LayerNorm<T>(store, name + ".norm_q", width);
  if (cross) norm_kv_ = LayerNorm<T>(store, name + ".norm_kv", width);
  attn_ = MultiHeadAttention<T>(store, seed, name + ".attn", width, heads);
  norm_mlp_ = LayerNorm<T>(store, name + ".norm_mlp", width);
  mlp_ = Mlp<T>(store, seed, name + ".mlp", {width, 2 * width, width});
}

template <typename T>
Tensor<T> AttentionBlock<T>::operator()(const Tensor<T>& x) const {
  if (cross_) throw Error(ErrorCode::kInvalidConfig, "cross-attention block needs a context");
  const auto n = norm_q_(x);
  auto y = ad::add(x, attn_(n, n));
  return ad::add(y, mlp_(norm_mlp_(y)));
}

template <typename T>
Tensor<T> AttentionBlock<T>::operator()(const Tensor<T>& x, const Tensor<T>& context) const {
  if (!cross_) throw Error(ErrorCode::kInvalidConfig, "self-attention block given a context");
  auto y = ad::add(x, attn_(norm_q_(x), norm_kv_(context)));
  return ad::add(y, mlp_(norm_mlp_(y)));
}

template <typename T>
Conv2d<T>::Conv2d(ParameterStore<T>& store, std::uint64_t seed, const std::string& name,
                  std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride)
    : kernel_(kernel), stride_(stride) {
  const std::size_t fan_in = in * kernel * kernel;
  weight_ = &add_uniform(store, seed, name + ".weight", {out, fan_in},
                         1.0 / std::sqrt(static_cast<double>(fan_in)));
  bias_ = &add_constant(store, name + ".bias", {out}, 0.0);
}

template <typename T>
Tensor<T> Conv2d<T>::operator()(const Tensor<T>& x) const {
  auto& g = x.graph();
  return ad::conv2d(x, g.param(*weight_), g.param(*bias_), kernel_, stride_, kernel_ / 2);
}

#define TRIPOINT_LAYERS(T)                                                                       \
  template Parameter<T>& add_uniform<T>(ParameterStore<T>&, std::uint64_t, const std::string&,  \
                                        Shape, double);                                          \
  template Parameter<T>& add_constant<T>(ParameterStore<T>&, const std::string&, Shape, double); \
  template class Linear<T>;                                                                      \
  template class Mlp<T>;                                                                         \
  template class LayerNorm<T>;                                                                   \
  template class MultiHeadAttention<T>;                                                          \
  template class AttentionBlock<T>;                                                              \
  template class Conv2d<T>;

TRIPOINT_LAYERS(float)
TRIPOINT_LAYERS(double)

}  // namespace tripoint::net
