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

#include "tripoint/network/block_checks.hpp"

#include "tripoint/network/model.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::net {

namespace {

using Model = GeoFormer<double>;
using P = Parameter<double>;

PointCloud random_cloud(Rng& rng, std::size_t n) {
  PointCloud cloud;
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  }
  return cloud;
}

// Random inputs treated as parameters so input gradients are checked too.
struct Inputs {
  ParameterStore<double> store;
  Rng rng;
  explicit Inputs(std::uint64_t seed) : rng(seed, "block_checks.inputs") {}
  P& add(const std::string& name, Shape shape, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(ad::numel(shape));
    for (auto& x : v) x = rng.uniform(lo, hi);
    return store.add(name, std::move(shape), std::move(v));
  }
};

// Fixed random weighting of an output so every element contributes.
Tensor<double> contract(const Tensor<double>& out, std::uint64_t seed) {
  Rng rng(seed, "block_checks.contract");
  std::vector<double> w(out.size());
  for (auto& x : w) x = rng.uniform(-1.0, 1.0);
  return ad::sum(ad::mul(out, out.graph().input(out.shape(), std::move(w))));
}

std::vector<P*> join(std::vector<P*> a, const std::vector<P*>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::vector<ad::GradCheckResult> check_blocks(const ModelConfig& config,
                                              const ad::GradCheckOptions& options) {
  std::vector<ad::GradCheckResult> results;
  const std::uint64_t seed = options.seed;
  Model model(config, seed);
  Inputs inputs(seed);
  Rng rng(seed, "block_checks.clouds");
  const std::size_t c = config.c;

  auto& fp = inputs.add("fp", {1, 2 * c});
  auto& fc = inputs.add("fc", {3, c});
  auto& f = inputs.add("f", {1, 4 * c});
  const PointCloud partial = random_cloud(rng, config.n_in);
  const PointCloud gt = random_cloud(rng, 2 * config.n_in);
  auto& prev = inputs.add("prev", {config.merge_target, 3}, 0.0, 1.0);

  {
    auto params = join(model.parameters_with_prefix("generator.align."), {&fp, &fc});
    results.push_back(ad::check_gradients(
        "block.align_features", params,
        [&](Graph<double>& g) {
          return contract(
              model.align_features(g.param(fp), g.param(fc), ccm::canonical_views()), seed);
        },
        options));
  }
  {
    auto params = join(model.parameters_with_prefix("generator.decoder."), {&f});
    results.push_back(ad::check_gradients(
        "block.decode_coords", params,
        [&](Graph<double>& g) {
          return contract(model.decode_coords(g.param(f), config.n_coarse), seed);
        },
        options));
  }
  {
    auto params = model.parameters_with_prefix("upsampler1.multiscale.");
    results.push_back(ad::check_gradients(
        "block.extract_multiscale", params,
        [&](Graph<double>& g) {
          return contract(model.extract_multiscale(g, 1, partial), seed);
        },
        options));
  }
  {
    auto params = join(model.parameters_with_prefix("upsampler1."), {&prev, &f});
    results.push_back(ad::check_gradients(
        "block.upsample", params,
        [&](Graph<double>& g) {
          return contract(model.upsample(1, g.param(prev), partial, g.param(f)), seed);
        },
        options));
  }
  {
    auto params = model.parameters().all();
    results.push_back(ad::check_gradients(
        "block.complete", params,
        [&](Graph<double>& g) {
          const auto out = model.forward(g, partial);
          return model.loss(out, cloud_tensor(g, gt));
        },
        options));
  }
  return results;
}

std::vector<ad::GradCheckResult> gradient_suite(const ad::GradCheckOptions& options) {
  auto results = ad::check_all_ops(options);
  for (auto& r : check_blocks(ModelConfig::tiny(), options)) results.push_back(std::move(r));
  return results;
}

}  // namespace tripoint::net
