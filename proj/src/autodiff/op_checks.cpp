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

#include <cmath>
#include <memory>

#include "tripoint/autodiff/gradcheck.hpp"
#include "tripoint/autodiff/ops.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::ad {

namespace {

using P = Parameter<double>;

struct Case {
  ParameterStore<double> store;
  Rng rng;
  std::vector<std::vector<double>> weights;

  explicit Case(std::uint64_t seed) : rng(seed) {}

  // lo/hi bound the operand values; log and friends need positive inputs.
  P& operand(const std::string& name, Shape shape, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = rng.uniform(lo, hi);
    return store.add(name, std::move(shape), std::move(v));
  }

  // Random contraction weights so every output element matters differently.
  Tensor<double> contract(const Tensor<double>& out) {
    if (weights.size() == 0) {
      std::vector<double> w(out.size());
      for (auto& x : w) x = rng.uniform(-1.0, 1.0);
      weights.push_back(std::move(w));
    }
    auto& g = out.graph();
    return sum(mul(out, g.input(out.shape(), weights.front())));
  }
};

using Builder = std::function<Tensor<double>(Graph<double>&, std::vector<P*>&)>;

GradCheckResult run(const std::string& name, Case& c, const Builder& build,
                    const GradCheckOptions& options) {
  auto params = c.store.all();
  return check_gradients(name, params,
                         [&](Graph<double>& g) { return c.contract(build(g, params)); },
                         options);
}

}  // namespace

std::vector<GradCheckResult> check_all_ops(const GradCheckOptions& options) {
  std::vector<GradCheckResult> results;
  std::uint64_t seed = options.seed;
  auto check = [&](const std::string& name, auto setup, const Builder& build) {
    auto c = std::make_unique<Case>(Rng::derive_seed(seed, name));
    setup(*c);
    results.push_back(run("op." + name, *c, build, options));
  };
  auto in = [](Graph<double>& g, P* p) { return g.param(*p); };

  check(
      "matmul", [](Case& c) { c.operand("a", {4, 5}); c.operand("b", {5, 3}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return matmul(in(g, p[0]), in(g, p[1])); });
  check(
      "add_broadcast", [](Case& c) { c.operand("a", {4, 5}); c.operand("b", {1, 5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return add(in(g, p[0]), in(g, p[1])); });
  check(
      "sub_broadcast", [](Case& c) { c.operand("a", {3, 4, 2}); c.operand("b", {4, 1}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return sub(in(g, p[0]), in(g, p[1])); });
  check(
      "mul_broadcast", [](Case& c) { c.operand("a", {4, 5}); c.operand("b", {5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return mul(in(g, p[0]), in(g, p[1])); });
  check(
      "scale", [](Case& c) { c.operand("a", {3, 4}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return scale(in(g, p[0]), -1.7); });
  check(
      "add_scalar", [](Case& c) { c.operand("a", {3, 4}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return add_scalar(in(g, p[0]), 0.3); });
  check(
      "concat", [](Case& c) { c.operand("a", {3, 2}); c.operand("b", {3, 4}); },
      [&](Graph<double>& g, std::vector<P*>& p) {
        return concat<double>({in(g, p[0]), in(g, p[1])}, 1);
      });
  check(
      "slice", [](Case& c) { c.operand("a", {4, 6}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return slice(in(g, p[0]), 1, 2, 3); });
  check(
      "reshape", [](Case& c) { c.operand("a", {4, 6}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return reshape(in(g, p[0]), {2, 3, 4}); });
  check(
      "transpose", [](Case& c) { c.operand("a", {4, 6}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return transpose(in(g, p[0])); });
  check(
      "relu", [](Case& c) { c.operand("a", {5, 5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return relu(in(g, p[0])); });
  check(
      "softmax", [](Case& c) { c.operand("a", {3, 6}, -2.0, 2.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return softmax(in(g, p[0])); });
  check(
      "layer_norm", [](Case& c) { c.operand("a", {3, 8}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return layer_norm(in(g, p[0])); });
  check(
      "max_reduce", [](Case& c) { c.operand("a", {4, 5, 3}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return max_reduce(in(g, p[0]), 1); });
  check(
      "min_reduce", [](Case& c) { c.operand("a", {4, 5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return min_reduce(in(g, p[0]), 0); });
  check(
      "mean_reduce", [](Case& c) { c.operand("a", {4, 5, 2}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return mean_reduce(in(g, p[0]), 2); });
  check(
      "sum", [](Case& c) { c.operand("a", {4, 5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return reshape(sum(in(g, p[0])), {1}); });
  check(
      "mean", [](Case& c) { c.operand("a", {4, 5}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return reshape(mean(in(g, p[0])), {1}); });
  check(
      "gather_rows", [](Case& c) { c.operand("a", {5, 3}); },
      [&](Graph<double>& g, std::vector<P*>& p) {
        const std::vector<std::size_t> idx = {4, 0, 0, 2, 4, 1};
        return gather_rows(in(g, p[0]), std::span<const std::size_t>(idx));
      });
  check(
      "exp", [](Case& c) { c.operand("a", {3, 4}); },
      [&](Graph<double>& g, std::vector<P*>& p) { return exp(in(g, p[0])); });
  check(
      "log", [](Case& c) { c.operand("a", {3, 4}, 0.2, 2.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return log(in(g, p[0])); });
  check(
      "sqrt", [](Case& c) { c.operand("a", {3, 4}, 0.2, 2.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return sqrt(in(g, p[0])); });
  check(
      "arcosh1p", [](Case& c) { c.operand("a", {3, 4}, 0.01, 1.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return arcosh1p(in(g, p[0])); });
  check(
      "sin", [](Case& c) { c.operand("a", {3, 4}, -3.0, 3.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return sin(in(g, p[0])); });
  check(
      "cos", [](Case& c) { c.operand("a", {3, 4}, -3.0, 3.0); },
      [&](Graph<double>& g, std::vector<P*>& p) { return cos(in(g, p[0])); });
  check(
      "pairwise_sqdist", [](Case& c) { c.operand("p", {5, 3}); c.operand("q", {4, 3}); },
      [&](Graph<double>& g, std::vector<P*>& p) {
        return pairwise_sqdist(in(g, p[0]), in(g, p[1]));
      });
  check(
      "conv2d",
      [](Case& c) {
        c.operand("x", {2, 5, 6});
        c.operand("w", {3, 2 * 3 * 3});
        c.operand("b", {3});
      },
      [&](Graph<double>& g, std::vector<P*>& p) {
        return conv2d(in(g, p[0]), in(g, p[1]), in(g, p[2]), 3, 2, 1);
      });
  check(
      "chamfer_l2", [](Case& c) { c.operand("p", {7, 3}); c.operand("q", {5, 3}); },
      [&](Graph<double>& g, std::vector<P*>& p) {
        return reshape(chamfer_l2(in(g, p[0]), in(g, p[1])), {1});
      });
  return results;
}

}  // namespace tripoint::ad
