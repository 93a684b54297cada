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

#include "tripoint/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tripoint/error.hpp"
#include "tripoint/simd.hpp"

namespace tripoint::ad {

namespace {

[[noreturn]] void shape_error(const std::string& op, const Shape& a, const Shape& b) {
  throw Error(ErrorCode::kShapeMismatch, op + ": " + shape_string(a) + " vs " + shape_string(b));
}

void check_axis(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw Error(ErrorCode::kAxisOutOfRange,
                std::string(op) + ": axis " + std::to_string(axis) + " of " + shape_string(shape));
  }
}

template <typename T>
std::vector<T> transposed(std::span<const T> a, std::size_t rows, std::size_t cols) {
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j * rows + i] = a[i * cols + j];
  }
  return out;
}

// Split a shape around an axis: outer x axis x inner.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// Index maps from each output element to its source elements under
// broadcasting. Empty vectors mean "identity" for the fast path.
struct BroadcastPlan {
  Shape out;
  // Fast path: each operand is either full-size or repeats with the inner
  // period over the leading axes of the output.
  bool fast = false;
  bool a_full = true;
  bool b_full = true;
  std::size_t period = 0;
  std::vector<std::size_t> a_idx, b_idx;  // general case only
};

// True when `small` (after dropping leading 1s) equals the trailing axes of
// `out`.
bool is_suffix(const Shape& small, const Shape& out) {
  std::size_t first = 0;
  while (first < small.size() && small[first] == 1) ++first;
  const std::size_t len = small.size() - first;
  if (len > out.size()) return false;
  return std::equal(small.begin() + static_cast<std::ptrdiff_t>(first), small.end(),
                    out.end() - static_cast<std::ptrdiff_t>(len));
}

BroadcastPlan plan_broadcast(const Shape& a, const Shape& b, const char* op) {
  BroadcastPlan plan;
  const std::size_t rank = std::max(a.size(), b.size());
  Shape pa(rank, 1), pb(rank, 1);
  std::copy(a.begin(), a.end(), pa.begin() + static_cast<std::ptrdiff_t>(rank - a.size()));
  std::copy(b.begin(), b.end(), pb.begin() + static_cast<std::ptrdiff_t>(rank - b.size()));
  plan.out.resize(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    if (pa[i] != pb[i] && pa[i] != 1 && pb[i] != 1) shape_error(op, a, b);
    plan.out[i] = std::max(pa[i], pb[i]);
  }
  const std::size_t n = numel(plan.out);
  plan.a_full = numel(a) == n;
  plan.b_full = numel(b) == n;
  if (plan.a_full && plan.b_full) {
    plan.fast = true;
    plan.period = n;
    return plan;
  }
  if (plan.a_full && is_suffix(b, plan.out)) {
    plan.fast = true;
    plan.period = numel(b);
    return plan;
  }
  if (plan.b_full && is_suffix(a, plan.out)) {
    plan.fast = true;
    plan.period = numel(a);
    return plan;
  }
  plan.a_idx.resize(n);
  plan.b_idx.resize(n);
  std::vector<std::size_t> sa(rank), sb(rank);
  std::size_t stride_a = 1, stride_b = 1;
  for (std::size_t i = rank; i-- > 0;) {
    sa[i] = pa[i] == 1 ? 0 : stride_a;
    sb[i] = pb[i] == 1 ? 0 : stride_b;
    stride_a *= pa[i];
    stride_b *= pb[i];
  }
  std::vector<std::size_t> counter(rank, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t o = 0; o < n; ++o) {
    plan.a_idx[o] = ia;
    plan.b_idx[o] = ib;
    for (std::size_t d = rank; d-- > 0;) {
      ++counter[d];
      ia += sa[d];
      ib += sb[d];
      if (counter[d] < plan.out[d]) break;
      ia -= sa[d] * counter[d];
      ib -= sb[d] * counter[d];
      counter[d] = 0;
    }
  }
  return plan;
}

// Calls f(o, ia, ib) for every output element in ascending o.
template <typename F>
void for_each_broadcast(const BroadcastPlan& plan, std::size_t n, F&& f) {
  if (plan.fast) {
    const std::size_t period = plan.period;
    for (std::size_t base = 0; base < n; base += period) {
      for (std::size_t k = 0; k < period; ++k) {
        const std::size_t o = base + k;
        f(o, plan.a_full ? o : k, plan.b_full ? o : k);
      }
    }
  } else {
    for (std::size_t o = 0; o < n; ++o) f(o, plan.a_idx[o], plan.b_idx[o]);
  }
}

enum class BinaryKind { kAdd, kSub, kMul };

template <typename T>
Tensor<T> binary(const Tensor<T>& a, const Tensor<T>& b, BinaryKind kind) {
  const char* name = kind == BinaryKind::kAdd ? "add" : kind == BinaryKind::kSub ? "sub" : "mul";
  auto plan = plan_broadcast(a.shape(), b.shape(), name);
  const auto av = a.value();
  const auto bv = b.value();
  const std::size_t n = numel(plan.out);
  std::vector<T> out(n);
  switch (kind) {
    case BinaryKind::kAdd:
      for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] + bv[j]; });
      break;
    case BinaryKind::kSub:
      for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] - bv[j]; });
      break;
    case BinaryKind::kMul:
      for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] * bv[j]; });
      break;
  }
  const std::size_t ida = a.id(), idb = b.id();
  const OpKind op = kind == BinaryKind::kAdd   ? OpKind::kAdd
                    : kind == BinaryKind::kSub ? OpKind::kSub
                                               : OpKind::kMul;
  Shape out_shape = plan.out;
  return a.graph().push(
      op, {ida, idb}, std::move(out_shape), std::move(out),
      [ida, idb, kind, n, plan = std::move(plan)](Graph<T>& g, const Node<T>& self) {
        const auto& go = self.grad;
        if (g.needs_grad(ida)) {
          auto& ga = g.grad_buffer(ida);
          if (kind == BinaryKind::kMul) {
            const auto& bv = g.node(idb).value;
            for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t j) { ga[i] += go[o] * bv[j]; });
          } else {
            for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t) { ga[i] += go[o]; });
          }
        }
        if (g.needs_grad(idb)) {
          auto& gb = g.grad_buffer(idb);
          if (kind == BinaryKind::kMul) {
            const auto& av = g.node(ida).value;
            for_each_broadcast(plan, n, [&](std::size_t o, std::size_t i, std::size_t j) { gb[j] += go[o] * av[i]; });
          } else if (kind == BinaryKind::kSub) {
            for_each_broadcast(plan, n, [&](std::size_t o, std::size_t, std::size_t j) { gb[j] -= go[o]; });
          } else {
            for_each_broadcast(plan, n, [&](std::size_t o, std::size_t, std::size_t j) { gb[j] += go[o]; });
          }
        }
      });
}

// Elementwise op with derivative expressed through input x and output y.
template <typename T, typename F, typename D>
Tensor<T> unary(const Tensor<T>& a, OpKind op, F f, D df) {
  const auto av = a.value();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::size_t ida = a.id();
  return a.graph().push(op, {ida}, a.shape(), std::move(out),
                        [ida, df](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          const auto& x = g.node(ida).value;
                          for (std::size_t i = 0; i < ga.size(); ++i) {
                            ga[i] += self.grad[i] * df(x[i], self.value[i]);
                          }
                        });
}

template <typename T>
Tensor<T> extreme_reduce(const Tensor<T>& a, std::size_t axis, bool take_max) {
  check_axis(a.shape(), axis, take_max ? "max_reduce" : "min_reduce");
  const auto s = split_at(a.shape(), axis);
  if (s.extent == 0) throw Error(ErrorCode::kShapeMismatch, "reduce over empty axis");
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  auto& graph = a.graph();
  const auto av = a.value();
  std::vector<T> out(s.outer * s.inner);
  std::vector<std::size_t> arg(out.size());
  if (const auto* logged = graph.next_replayed()) {
    if (logged->size() != arg.size()) {
      throw Error(ErrorCode::kShapeMismatch, "replayed reduce picks do not match the graph");
    }
    arg = *logged;
    for (std::size_t i = 0; i < arg.size(); ++i) out[i] = av[arg[i]];
  } else {
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.extent * s.inner + in;
        std::size_t best = 0;
        T best_v = av[base];
        for (std::size_t e = 1; e < s.extent; ++e) {
          const T v = av[base + e * s.inner];
          if (take_max ? v > best_v : v < best_v) {
            best_v = v;
            best = e;
          }
        }
        out[o * s.inner + in] = best_v;
        arg[o * s.inner + in] = base + best * s.inner;
      }
    }
    graph.log_choice(arg);
  }
  const std::size_t ida = a.id();
  return graph.push(take_max ? OpKind::kMaxReduce : OpKind::kMinReduce, {ida},
                    std::move(out_shape), std::move(out),
                    [ida, arg = std::move(arg)](Graph<T>& g, const Node<T>& self) {
                      auto& ga = g.grad_buffer(ida);
                      for (std::size_t i = 0; i < arg.size(); ++i) ga[arg[i]] += self.grad[i];
                    });
}

}  // namespace

std::vector<std::size_t> repeat_each(std::size_t n, std::size_t times) {
  std::vector<std::size_t> idx;
  idx.reserve(n * times);
  for (std::size_t i = 0; i < n; ++i) idx.insert(idx.end(), times, i);
  return idx;
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    shape_error("matmul", a.shape(), b.shape());
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<T> out(m * n);
  simd::gemm<T>(m, n, k, a.value().data(), b.value().data(), out.data(), false);
  const std::size_t ida = a.id(), idb = b.id();
  return a.graph().push(OpKind::kMatMul, {ida, idb}, {m, n}, std::move(out),
                        [ida, idb, m, k, n](Graph<T>& g, const Node<T>& self) {
                          if (g.needs_grad(ida)) {
                            // dA = dC * B^T
                            const auto bt = transposed<T>(g.node(idb).value, k, n);
                            simd::gemm<T>(m, k, n, self.grad.data(), bt.data(),
                                          g.grad_buffer(ida).data(), true);
                          }
                          if (g.needs_grad(idb)) {
                            // dB = A^T * dC
                            const auto at = transposed<T>(g.node(ida).value, m, k);
                            simd::gemm<T>(k, n, m, at.data(), self.grad.data(),
                                          g.grad_buffer(idb).data(), true);
                          }
                        });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryKind::kAdd);
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryKind::kSub);
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return binary(a, b, BinaryKind::kMul);
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  return unary(
      a, OpKind::kScale, [factor](T x) { return x * factor; },
      [factor](T, T) { return factor; });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset) {
  return unary(
      a, OpKind::kAddScalar, [offset](T x) { return x + offset; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> concat(std::span<const Tensor<T>> parts, std::size_t axis) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat of nothing");
  const Shape& first = parts[0].shape();
  check_axis(first, axis, "concat");
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    if (p.rank() != first.size()) shape_error("concat", first, p.shape());
    for (std::size_t d = 0; d < first.size(); ++d) {
      if (d != axis && p.dim(d) != first[d]) shape_error("concat", first, p.shape());
    }
    out_shape[axis] += p.dim(axis);
  }
  const auto s = split_at(out_shape, axis);
  std::vector<T> out(numel(out_shape));
  std::vector<std::size_t> ids, offsets, extents;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t ext = p.dim(axis);
    const auto pv = p.value();
    for (std::size_t o = 0; o < s.outer; ++o) {
      std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(o * ext * s.inner), ext * s.inner,
                  out.begin() + static_cast<std::ptrdiff_t>((o * s.extent + offset) * s.inner));
    }
    ids.push_back(p.id());
    offsets.push_back(offset);
    extents.push_back(ext);
    offset += ext;
  }
  return parts[0].graph().push(
      OpKind::kConcat, ids, out_shape, std::move(out),
      [ids, offsets, extents, s](Graph<T>& g, const Node<T>& self) {
        for (std::size_t pi = 0; pi < ids.size(); ++pi) {
          if (!g.needs_grad(ids[pi])) continue;
          auto& gp = g.grad_buffer(ids[pi]);
          const std::size_t ext = extents[pi];
          for (std::size_t o = 0; o < s.outer; ++o) {
            const T* src = self.grad.data() + (o * s.extent + offsets[pi]) * s.inner;
            T* dst = gp.data() + o * ext * s.inner;
            for (std::size_t i = 0; i < ext * s.inner; ++i) dst[i] += src[i];
          }
        }
      });
}

template <typename T>
Tensor<T> slice(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t length) {
  check_axis(a.shape(), axis, "slice");
  if (start + length > a.dim(axis)) {
    throw Error(ErrorCode::kShapeMismatch, "slice [" + std::to_string(start) + ", " +
                                               std::to_string(start + length) + ") of " +
                                               shape_string(a.shape()));
  }
  const auto s = split_at(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape[axis] = length;
  const auto av = a.value();
  std::vector<T> out(numel(out_shape));
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>((o * s.extent + start) * s.inner),
                length * s.inner,
                out.begin() + static_cast<std::ptrdiff_t>(o * length * s.inner));
  }
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kSlice, {ida}, std::move(out_shape), std::move(out),
                        [ida, s, start, length](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t o = 0; o < s.outer; ++o) {
                            const T* src = self.grad.data() + o * length * s.inner;
                            T* dst = ga.data() + (o * s.extent + start) * s.inner;
                            for (std::size_t i = 0; i < length * s.inner; ++i) dst[i] += src[i];
                          }
                        });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.size()) shape_error("reshape", a.shape(), shape);
  std::vector<T> out(a.value().begin(), a.value().end());
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kReshape, {ida}, std::move(shape), std::move(out),
                        [ida](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
                        });
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  if (a.rank() != 2) throw Error(ErrorCode::kShapeMismatch, "transpose needs a 2-D tensor");
  const std::size_t r = a.dim(0), c = a.dim(1);
  auto out = transposed<T>(a.value(), r, c);
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kTranspose, {ida}, {c, r}, std::move(out),
                        [ida, r, c](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t i = 0; i < r; ++i) {
                            for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += self.grad[j * r + i];
                          }
                        });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  auto& graph = a.graph();
  const auto av = a.value();
  std::vector<std::size_t> mask(av.size());
  if (const auto* logged = graph.next_replayed()) {
    if (logged->size() != mask.size()) {
      throw Error(ErrorCode::kShapeMismatch, "replayed relu mask does not match the graph");
    }
    mask = *logged;
  } else {
    for (std::size_t i = 0; i < av.size(); ++i) mask[i] = av[i] > T(0) ? 1 : 0;
    graph.log_choice(mask);
  }
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = mask[i] != 0 ? av[i] : T(0);
  const std::size_t ida = a.id();
  return graph.push(OpKind::kRelu, {ida}, a.shape(), std::move(out),
                    [ida, mask = std::move(mask)](Graph<T>& g, const Node<T>& self) {
                      auto& ga = g.grad_buffer(ida);
                      for (std::size_t i = 0; i < ga.size(); ++i) {
                        if (mask[i] != 0) ga[i] += self.grad[i];
                      }
                    });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& a) {
  if (a.rank() == 0 || a.shape().back() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "softmax needs a non-empty last axis");
  }
  const std::size_t width = a.shape().back();
  const std::size_t rows = a.size() / width;
  const auto av = a.value();
  std::vector<T> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = av.data() + r * width;
    T* y = out.data() + r * width;
    const T mx = *std::max_element(x, x + width);
    T total = 0;
    for (std::size_t i = 0; i < width; ++i) {
      y[i] = std::exp(x[i] - mx);
      total += y[i];
    }
    for (std::size_t i = 0; i < width; ++i) y[i] /= total;
  }
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kSoftmax, {ida}, a.shape(), std::move(out),
                        [ida, rows, width](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t r = 0; r < rows; ++r) {
                            const T* y = self.value.data() + r * width;
                            const T* gy = self.grad.data() + r * width;
                            T dot = 0;
                            for (std::size_t i = 0; i < width; ++i) dot += gy[i] * y[i];
                            T* gx = ga.data() + r * width;
                            for (std::size_t i = 0; i < width; ++i) gx[i] += y[i] * (gy[i] - dot);
                          }
                        });
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, T eps) {
  if (a.rank() == 0 || a.shape().back() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "layer_norm needs a non-empty last axis");
  }
  const std::size_t width = a.shape().back();
  const std::size_t rows = a.size() / width;
  const auto av = a.value();
  std::vector<T> out(a.size());
  std::vector<T> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = av.data() + r * width;
    T mu = 0;
    for (std::size_t i = 0; i < width; ++i) mu += x[i];
    mu /= static_cast<T>(width);
    T var = 0;
    for (std::size_t i = 0; i < width; ++i) var += (x[i] - mu) * (x[i] - mu);
    var /= static_cast<T>(width);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t i = 0; i < width; ++i) out[r * width + i] = (x[i] - mu) * inv_std[r];
  }
  const std::size_t ida = a.id();
  return a.graph().push(
      OpKind::kLayerNorm, {ida}, a.shape(), std::move(out),
      [ida, rows, width, inv_std = std::move(inv_std)](Graph<T>& g, const Node<T>& self) {
        auto& ga = g.grad_buffer(ida);
        const T inv_w = T(1) / static_cast<T>(width);
        for (std::size_t r = 0; r < rows; ++r) {
          const T* y = self.value.data() + r * width;
          const T* gy = self.grad.data() + r * width;
          T mean_g = 0, mean_gy = 0;
          for (std::size_t i = 0; i < width; ++i) {
            mean_g += gy[i];
            mean_gy += gy[i] * y[i];
          }
          mean_g *= inv_w;
          mean_gy *= inv_w;
          T* gx = ga.data() + r * width;
          for (std::size_t i = 0; i < width; ++i) {
            gx[i] += inv_std[r] * (gy[i] - mean_g - y[i] * mean_gy);
          }
        }
      });
}

template <typename T>
Tensor<T> max_reduce(const Tensor<T>& a, std::size_t axis) {
  return extreme_reduce(a, axis, true);
}

template <typename T>
Tensor<T> min_reduce(const Tensor<T>& a, std::size_t axis) {
  return extreme_reduce(a, axis, false);
}

template <typename T>
Tensor<T> mean_reduce(const Tensor<T>& a, std::size_t axis) {
  check_axis(a.shape(), axis, "mean_reduce");
  const auto s = split_at(a.shape(), axis);
  if (s.extent == 0) throw Error(ErrorCode::kShapeMismatch, "mean over empty axis");
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  const auto av = a.value();
  std::vector<T> out(s.outer * s.inner, T(0));
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t e = 0; e < s.extent; ++e) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        out[o * s.inner + in] += av[(o * s.extent + e) * s.inner + in];
      }
    }
  }
  const T inv = T(1) / static_cast<T>(s.extent);
  for (auto& v : out) v *= inv;
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kMeanReduce, {ida}, std::move(out_shape), std::move(out),
                        [ida, s, inv](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t o = 0; o < s.outer; ++o) {
                            for (std::size_t e = 0; e < s.extent; ++e) {
                              for (std::size_t in = 0; in < s.inner; ++in) {
                                ga[(o * s.extent + e) * s.inner + in] +=
                                    self.grad[o * s.inner + in] * inv;
                              }
                            }
                          }
                        });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = 0;
  for (T v : a.value()) total += v;
  const std::size_t ida = a.id();
  return a.graph().push(OpKind::kSum, {ida}, {}, {total}, [ida](Graph<T>& g, const Node<T>& self) {
    auto& ga = g.grad_buffer(ida);
    for (auto& v : ga) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  if (a.size() == 0) throw Error(ErrorCode::kShapeMismatch, "mean of an empty tensor");
  return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& a, std::span<const std::size_t> indices) {
  if (a.rank() == 0) throw Error(ErrorCode::kShapeMismatch, "gather_rows on a scalar");
  const std::size_t rows = a.dim(0);
  const std::size_t width = a.size() / std::max<std::size_t>(rows, 1);
  for (auto i : indices) {
    if (i >= rows) {
      throw Error(ErrorCode::kShapeMismatch,
                  "row " + std::to_string(i) + " of " + shape_string(a.shape()));
    }
  }
  a.graph().record_decision(indices);
  Shape out_shape = a.shape();
  out_shape[0] = indices.size();
  const auto av = a.value();
  std::vector<T> out(indices.size() * width);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(indices[r] * width), width,
                out.begin() + static_cast<std::ptrdiff_t>(r * width));
  }
  const std::size_t ida = a.id();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return a.graph().push(OpKind::kGatherRows, {ida}, std::move(out_shape), std::move(out),
                        [ida, width, idx = std::move(idx)](Graph<T>& g, const Node<T>& self) {
                          auto& ga = g.grad_buffer(ida);
                          for (std::size_t r = 0; r < idx.size(); ++r) {
                            const T* src = self.grad.data() + r * width;
                            T* dst = ga.data() + idx[r] * width;
                            for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
                          }
                        });
}

template <typename T>
Tensor<T> exp(const Tensor<T>& a) {
  return unary(
      a, OpKind::kExp, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  return unary(
      a, OpKind::kLog, [](T x) { return std::log(x); }, [](T x, T) { return T(1) / x; });
}

template <typename T>
Tensor<T> sqrt(const Tensor<T>& a) {
  return unary(
      a, OpKind::kSqrt, [](T x) { return std::sqrt(x); },
      [](T, T y) { return y > T(0) ? T(0.5) / y : T(0); });
}

template <typename T>
Tensor<T> arcosh1p(const Tensor<T>& a) {
  // d/dx arcosh(1 + x) = 1 / sqrt(x (x + 2)); floored so x = 0 stays finite.
  static constexpr T kFloor = T(1e-12);
  return unary(
      a, OpKind::kArcosh1p, [](T x) { return std::log1p(x + std::sqrt(x * (x + T(2)))); },
      [](T x, T) { return T(1) / std::sqrt(std::max(x * (x + T(2)), kFloor)); });
}

template <typename T>
Tensor<T> sin(const Tensor<T>& a) {
  return unary(
      a, OpKind::kSin, [](T x) { return std::sin(x); }, [](T x, T) { return std::cos(x); });
}

template <typename T>
Tensor<T> cos(const Tensor<T>& a) {
  return unary(
      a, OpKind::kCos, [](T x) { return std::cos(x); }, [](T x, T) { return -std::sin(x); });
}

template <typename T>
Tensor<T> pairwise_sqdist(const Tensor<T>& p, const Tensor<T>& q) {
  if (p.rank() != 2 || q.rank() != 2 || p.dim(1) != 3 || q.dim(1) != 3) {
    shape_error("pairwise_sqdist", p.shape(), q.shape());
  }
  const std::size_t np = p.dim(0), nq = q.dim(0);
  const auto qv = q.value();
  std::vector<T> qx(nq), qy(nq), qz(nq);
  for (std::size_t j = 0; j < nq; ++j) {
    qx[j] = qv[3 * j];
    qy[j] = qv[3 * j + 1];
    qz[j] = qv[3 * j + 2];
  }
  std::vector<T> out(np * nq);
  simd::pairwise_sqdist<T>(p.value().data(), np, qx.data(), qy.data(), qz.data(), nq, out.data());
  const std::size_t idp = p.id(), idq = q.id();
  return p.graph().push(
      OpKind::kPairwiseSqdist, {idp, idq}, {np, nq}, std::move(out),
      [idp, idq, np, nq](Graph<T>& g, const Node<T>& self) {
        // d/dp_i = 2 sum_j g_ij (p_i - q_j), d/dq_j = -2 sum_i g_ij (p_i - q_j)
        const auto& pv = g.node(idp).value;
        const auto& qv = g.node(idq).value;
        const auto& go = self.grad;
        if (g.needs_grad(idp)) {
          auto& gp = g.grad_buffer(idp);
          for (std::size_t i = 0; i < np; ++i) {
            const T* row = go.data() + i * nq;
            T acc[3] = {0, 0, 0};
            for (std::size_t j = 0; j < nq; ++j) {
              const T w = row[j];
              if (w == T(0)) continue;
              for (int c = 0; c < 3; ++c) acc[c] += w * (pv[3 * i + c] - qv[3 * j + c]);
            }
            for (int c = 0; c < 3; ++c) gp[3 * i + c] += T(2) * acc[c];
          }
        }
        if (g.needs_grad(idq)) {
          auto& gq = g.grad_buffer(idq);
          for (std::size_t i = 0; i < np; ++i) {
            const T* row = go.data() + i * nq;
            for (std::size_t j = 0; j < nq; ++j) {
              const T w = row[j];
              if (w == T(0)) continue;
              for (int c = 0; c < 3; ++c) gq[3 * j + c] -= T(2) * w * (pv[3 * i + c] - qv[3 * j + c]);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 std::size_t kernel, std::size_t stride, std::size_t padding) {
  if (x.rank() != 3 || weight.rank() != 2 || bias.rank() != 1) {
    shape_error("conv2d", x.shape(), weight.shape());
  }
  const std::size_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t cout = weight.dim(0);
  const std::size_t patch = cin * kernel * kernel;
  if (weight.dim(1) != patch || bias.dim(0) != cout || stride == 0 || kernel == 0 ||
      h + 2 * padding < kernel || w + 2 * padding < kernel) {
    shape_error("conv2d", x.shape(), weight.shape());
  }
  const std::size_t ho = (h + 2 * padding - kernel) / stride + 1;
  const std::size_t wo = (w + 2 * padding - kernel) / stride + 1;
  const std::size_t npix = ho * wo;

  // im2col: (patch x npix); -1 marks padding.
  std::vector<std::ptrdiff_t> src(patch * npix, -1);
  for (std::size_t c = 0; c < cin; ++c) {
    for (std::size_t ky = 0; ky < kernel; ++ky) {
      for (std::size_t kx = 0; kx < kernel; ++kx) {
        const std::size_t prow = (c * kernel + ky) * kernel + kx;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * stride + ky) - static_cast<std::ptrdiff_t>(padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * stride + kx) - static_cast<std::ptrdiff_t>(padding);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
            src[prow * npix + oy * wo + ox] =
                static_cast<std::ptrdiff_t>((c * h + static_cast<std::size_t>(iy)) * w +
                                            static_cast<std::size_t>(ix));
          }
        }
      }
    }
  }
  const auto xv = x.value();
  std::vector<T> cols(patch * npix, T(0));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (src[i] >= 0) cols[i] = xv[static_cast<std::size_t>(src[i])];
  }
  std::vector<T> out(cout * npix);
  simd::gemm<T>(cout, npix, patch, weight.value().data(), cols.data(), out.data(), false);
  const auto bv = bias.value();
  for (std::size_t c = 0; c < cout; ++c) {
    for (std::size_t p = 0; p < npix; ++p) out[c * npix + p] += bv[c];
  }
  const std::size_t idx = x.id(), idw = weight.id(), idb = bias.id();
  return x.graph().push(
      OpKind::kConv2d, {idx, idw, idb}, {cout, ho, wo}, std::move(out),
      [idx, idw, idb, cout, patch, npix, src = std::move(src), cols = std::move(cols)](
          Graph<T>& g, const Node<T>& self) {
        const auto& go = self.grad;
        if (g.needs_grad(idb)) {
          auto& gb = g.grad_buffer(idb);
          for (std::size_t c = 0; c < cout; ++c) {
            T acc = 0;
            for (std::size_t p = 0; p < npix; ++p) acc += go[c * npix + p];
            gb[c] += acc;
          }
        }
        if (g.needs_grad(idw)) {
          const auto cols_t = transposed<T>(cols, patch, npix);
          simd::gemm<T>(cout, patch, npix, go.data(), cols_t.data(), g.grad_buffer(idw).data(),
                        true);
        }
        if (g.needs_grad(idx)) {
          const auto wt = transposed<T>(g.node(idw).value, cout, patch);
          std::vector<T> gcols(patch * npix);
          simd::gemm<T>(patch, npix, cout, wt.data(), go.data(), gcols.data(), false);
          auto& gx = g.grad_buffer(idx);
          for (std::size_t i = 0; i < gcols.size(); ++i) {
            if (src[i] >= 0) gx[static_cast<std::size_t>(src[i])] += gcols[i];
          }
        }
      });
}

template <typename T>
Tensor<T> chamfer_l2(const Tensor<T>& p, const Tensor<T>& q) {
  if (p.rank() != 2 || q.rank() != 2 || p.dim(1) != 3 || q.dim(1) != 3 || p.dim(0) == 0 ||
      q.dim(0) == 0) {
    shape_error("chamfer_l2", p.shape(), q.shape());
  }
  auto& graph = p.graph();
  const std::size_t np = p.dim(0), nq = q.dim(0);
  const auto pv = p.value();
  const auto qv = q.value();
  // nearest[0, np): q index nearest each p; nearest[np, np + nq): p index
  // nearest each q. Ties go to the lowest index.
  std::vector<std::size_t> nearest(np + nq);
  if (const auto* logged = graph.next_replayed()) {
    if (logged->size() != nearest.size()) {
      throw Error(ErrorCode::kShapeMismatch, "replayed chamfer matches do not match the graph");
    }
    nearest = *logged;
  } else {
    std::vector<T> qx(nq), qy(nq), qz(nq);
    for (std::size_t j = 0; j < nq; ++j) {
      qx[j] = qv[3 * j];
      qy[j] = qv[3 * j + 1];
      qz[j] = qv[3 * j + 2];
    }
    constexpr std::size_t kBlock = 64;
    std::vector<T> block(kBlock * nq);
    std::vector<T> col_best(nq);
    for (std::size_t i0 = 0; i0 < np; i0 += kBlock) {
      const std::size_t rows = std::min(kBlock, np - i0);
      simd::pairwise_sqdist<T>(pv.data() + 3 * i0, rows, qx.data(), qy.data(), qz.data(), nq,
                               block.data());
      for (std::size_t r = 0; r < rows; ++r) {
        const T* row = block.data() + r * nq;
        const std::size_t i = i0 + r;
        std::size_t best = 0;
        for (std::size_t j = 1; j < nq; ++j) {
          if (row[j] < row[best]) best = j;
        }
        nearest[i] = best;
        for (std::size_t j = 0; j < nq; ++j) {
          if (i == 0 || row[j] < col_best[j]) {
            col_best[j] = row[j];
            nearest[np + j] = i;
          }
        }
      }
    }
    graph.log_choice(nearest);
  }
  auto sqdist = [&](std::size_t i, std::size_t j) {
    const T dx = pv[3 * i] - qv[3 * j];
    const T dy = pv[3 * i + 1] - qv[3 * j + 1];
    const T dz = pv[3 * i + 2] - qv[3 * j + 2];
    return dx * dx + dy * dy + dz * dz;
  };
  double forward = 0.0, backward = 0.0;
  for (std::size_t i = 0; i < np; ++i) forward += sqdist(i, nearest[i]);
  for (std::size_t j = 0; j < nq; ++j) backward += sqdist(nearest[np + j], j);
  const T value = static_cast<T>(forward / static_cast<double>(np) +
                                 backward / static_cast<double>(nq));
  const std::size_t idp = p.id(), idq = q.id();
  return graph.push(
      OpKind::kChamfer, {idp, idq}, {}, {value},
      [idp, idq, np, nq, nearest = std::move(nearest)](Graph<T>& g, const Node<T>& self) {
        const auto& pv = g.node(idp).value;
        const auto& qv = g.node(idq).value;
        const bool want_p = g.needs_grad(idp), want_q = g.needs_grad(idq);
        T* gp = want_p ? g.grad_buffer(idp).data() : nullptr;
        T* gq = want_q ? g.grad_buffer(idq).data() : nullptr;
        auto pull = [&](std::size_t i, std::size_t j, T coef) {
          for (std::size_t c = 0; c < 3; ++c) {
            const T d = coef * (pv[3 * i + c] - qv[3 * j + c]);
            if (gp) gp[3 * i + c] += d;
            if (gq) gq[3 * j + c] -= d;
          }
        };
        const T cp = T(2) * self.grad[0] / static_cast<T>(np);
        const T cq = T(2) * self.grad[0] / static_cast<T>(nq);
        for (std::size_t i = 0; i < np; ++i) pull(i, nearest[i], cp);
        for (std::size_t j = 0; j < nq; ++j) pull(nearest[np + j], j, cq);
      });
}

#define TRIPOINT_INSTANTIATE_OPS(T)                                                              \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                    \
  template Tensor<T> scale(const Tensor<T>&, T);                                                 \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                            \
  template Tensor<T> concat(std::span<const Tensor<T>>, std::size_t);                            \
  template Tensor<T> slice(const Tensor<T>&, std::size_t, std::size_t, std::size_t);             \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                           \
  template Tensor<T> transpose(const Tensor<T>&);                                                \
  template Tensor<T> relu(const Tensor<T>&);                                                     \
  template Tensor<T> softmax(const Tensor<T>&);                                                  \
  template Tensor<T> layer_norm(const Tensor<T>&, T);                                            \
  template Tensor<T> max_reduce(const Tensor<T>&, std::size_t);                                  \
  template Tensor<T> min_reduce(const Tensor<T>&, std::size_t);                                  \
  template Tensor<T> mean_reduce(const Tensor<T>&, std::size_t);                                 \
  template Tensor<T> sum(const Tensor<T>&);                                                      \
  template Tensor<T> mean(const Tensor<T>&);                                                     \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::size_t>);                \
  template Tensor<T> exp(const Tensor<T>&);                                                      \
  template Tensor<T> log(const Tensor<T>&);                                                      \
  template Tensor<T> sqrt(const Tensor<T>&);                                                     \
  template Tensor<T> arcosh1p(const Tensor<T>&);                                                 \
  template Tensor<T> sin(const Tensor<T>&);                                                      \
  template Tensor<T> cos(const Tensor<T>&);                                                      \
  template Tensor<T> pairwise_sqdist(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,   \
                            std::size_t, std::size_t);                                           \
  template Tensor<T> chamfer_l2(const Tensor<T>&, const Tensor<T>&);

TRIPOINT_INSTANTIATE_OPS(float)
TRIPOINT_INSTANTIATE_OPS(double)

#undef TRIPOINT_INSTANTIATE_OPS

}  // namespace tripoint::ad
