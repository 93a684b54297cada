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

#include <cstddef>
#include <span>
#include <vector>

#include "tripoint/autodiff/tensor.hpp"

namespace tripoint::ad {

// All ops append a node to the graph of their first operand. Shapes are
// row-major; "rows" means the leading axis of a 2-D tensor.

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);  // (m,k) x (k,n)

// Elementwise with numpy-style broadcasting (trailing axes aligned, size-1
// axes stretched).
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset);

template <typename T>
Tensor<T> concat(std::span<const Tensor<T>> parts, std::size_t axis);
template <typename T>
Tensor<T> concat(std::initializer_list<Tensor<T>> parts, std::size_t axis) {
  std::vector<Tensor<T>> v(parts);
  return concat<T>(std::span<const Tensor<T>>(v), axis);
}
template <typename T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t length);
template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <typename T>
Tensor<T> transpose(const Tensor<T>& a);  // 2-D

template <typename T>
Tensor<T> relu(const Tensor<T>& a);
template <typename T>
Tensor<T> softmax(const Tensor<T>& a);  // over the last axis

// Zero-mean, unit-variance over the last axis (no affine part).
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, T eps = T(1e-5));

// Reductions drop the reduced axis. Max/min route the gradient to the first
// extreme element.
template <typename T>
Tensor<T> max_reduce(const Tensor<T>& a, std::size_t axis);
template <typename T>
Tensor<T> min_reduce(const Tensor<T>& a, std::size_t axis);
template <typename T>
Tensor<T> mean_reduce(const Tensor<T>& a, std::size_t axis);
template <typename T>
Tensor<T> sum(const Tensor<T>& a);  // to a scalar of shape ()
template <typename T>
Tensor<T> mean(const Tensor<T>& a);

// Row select along axis 0; rows may repeat. Index == rows(a) is out of range.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& a, std::span<const std::size_t> indices);

template <typename T>
Tensor<T> exp(const Tensor<T>& a);
template <typename T>
Tensor<T> log(const Tensor<T>& a);
template <typename T>
Tensor<T> sqrt(const Tensor<T>& a);
// arcosh(1 + x), computed as log1p(x + sqrt(x (x + 2))) for accuracy near 0.
template <typename T>
Tensor<T> arcosh1p(const Tensor<T>& a);
template <typename T>
Tensor<T> sin(const Tensor<T>& a);
template <typename T>
Tensor<T> cos(const Tensor<T>& a);

// (N,3) x (M,3) -> (N,M) squared Euclidean distances.
template <typename T>
Tensor<T> pairwise_sqdist(const Tensor<T>& p, const Tensor<T>& q);

// Single image convolution. x: (Cin,H,W); weight: (Cout, Cin*kh*kw); bias:
// (Cout). Output (Cout, Ho, Wo) with zero padding.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 std::size_t kernel, std::size_t stride, std::size_t padding);

// Mean L2 chamfer distance between two (N,3)/(M,3) tensors, both directions
// summed. Nearest assignments are held fixed for the gradient.
template <typename T>
Tensor<T> chamfer_l2(const Tensor<T>& p, const Tensor<T>& q);

// Row indices {0 x times, 1 x times, ...} for gather_rows.
std::vector<std::size_t> repeat_each(std::size_t n, std::size_t times);

}  // namespace tripoint::ad
