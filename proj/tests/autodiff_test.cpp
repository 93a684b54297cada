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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "test_util.hpp"
#include "tripoint/autodiff/checkpoint.hpp"
#include "tripoint/autodiff/gradcheck.hpp"
#include "tripoint/autodiff/ops.hpp"
#include "tripoint/autodiff/optim.hpp"
#include "tripoint/error.hpp"

namespace tripoint::ad {
namespace {

using G = Graph<double>;
using V = std::vector<double>;

template <typename Fn>
void expect_error(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << error_code_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

V values(const Tensor<double>& t) { return V(t.value().begin(), t.value().end()); }

TEST(Ops, MatmulScalarChainRule) {
  ParameterStore<double> store;
  auto& a = store.add("a", {1, 1}, {2});
  auto& b = store.add("b", {1, 1}, {3});
  G g;
  auto y = matmul(g.param(a), g.param(b));
  EXPECT_EQ(values(y), V{6});
  g.backward(sum(y));
  EXPECT_EQ(a.grad, V{3});
  EXPECT_EQ(b.grad, V{2});
}

TEST(Ops, SoftmaxSymmetric) {
  G g;
  EXPECT_EQ(values(softmax(g.input({2}, {0, 0}))), (V{0.5, 0.5}));
}

TEST(Ops, PairwiseSqdistHand) {
  G g;
  auto d = pairwise_sqdist(g.input({1, 3}, {0, 0, 0}), g.input({2, 3}, {1, 0, 0, 0, 2, 0}));
  EXPECT_EQ(d.shape(), (Shape{1, 2}));
  EXPECT_EQ(values(d), (V{1, 4}));
}

TEST(Ops, SumOfSquaresGradient) {
  ParameterStore<double> store;
  auto& x = store.add("x", {2}, {1, 2});
  G g;
  auto t = g.param(x);
  g.backward(sum(mul(t, t)));
  EXPECT_EQ(x.grad, (V{2, 4}));
}

TEST(Ops, ChamferSingletonGradient) {
  ParameterStore<double> store;
  auto& p = store.add("p", {1, 3}, {0, 0, 0});
  G g;
  auto loss = chamfer_l2(g.param(p), g.input({1, 3}, {1, 0, 0}));
  EXPECT_EQ(loss.item(), 2.0);
  g.backward(loss);
  EXPECT_EQ(p.grad, (V{-4, 0, 0}));
}

TEST(Ops, ChamferMatchesPairwiseComposition) {
  Rng rng(51);
  V pv(30), qv(21);
  for (auto& v : pv) v = rng.uniform();
  for (auto& v : qv) v = rng.uniform();
  G g;
  auto p = g.input({10, 3}, pv), q = g.input({7, 3}, qv);
  auto d = pairwise_sqdist(p, q);
  auto ref = add(mean(min_reduce(d, 1)), mean(min_reduce(d, 0)));
  EXPECT_NEAR(chamfer_l2(p, q).item(), ref.item(), 1e-15);
}

TEST(Ops, MaxReduceRoutesToFirstMax) {
  ParameterStore<double> store;
  auto& x = store.add("x", {2, 3}, {1, 5, 5, 7, 2, 7});
  G g;
  auto m = max_reduce(g.param(x), 1);
  EXPECT_EQ(values(m), (V{5, 7}));
  g.backward(sum(m));
  EXPECT_EQ(x.grad, (V{0, 1, 0, 1, 0, 0}));
}

TEST(Ops, BroadcastAddEqualsExplicitTiling) {
  Rng rng(52);
  const Shape shapes[][2] = {{{4, 3}, {3}}, {{4, 3}, {1, 3}}, {{4, 1}, {1, 5}},
                             {{2, 3, 4}, {3, 1}}, {{5}, {2, 1}}, {{1}, {3, 2}}};
  for (const auto& s : shapes) {
    G g;
    V av(numel(s[0])), bv(numel(s[1]));
    for (auto& v : av) v = rng.uniform(-1, 1);
    for (auto& v : bv) v = rng.uniform(-1, 1);
    auto out = add(g.input(s[0], av), g.input(s[1], bv));
    // Explicit tiling oracle.
    const std::size_t rank = std::max(s[0].size(), s[1].size());
    Shape pa(rank, 1), pb(rank, 1), po(rank);
    std::copy(s[0].begin(), s[0].end(), pa.end() - s[0].size());
    std::copy(s[1].begin(), s[1].end(), pb.end() - s[1].size());
    for (std::size_t i = 0; i < rank; ++i) po[i] = std::max(pa[i], pb[i]);
    ASSERT_EQ(out.shape(), po);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t o = 0; o < numel(po); ++o) {
      std::size_t ia = 0, ib = 0;
      for (std::size_t d = 0; d < rank; ++d) {
        ia = ia * pa[d] + (pa[d] == 1 ? 0 : idx[d]);
        ib = ib * pb[d] + (pb[d] == 1 ? 0 : idx[d]);
      }
      EXPECT_EQ(out.value()[o], av[ia] + bv[ib]);
      for (std::size_t d = rank; d-- > 0;) {
        if (++idx[d] < po[d]) break;
        idx[d] = 0;
      }
    }
  }
}

TEST(Ops, BroadcastGradientSumsOverTiles) {
  ParameterStore<double> store;
  auto& b = store.add("b", {3}, {0, 0, 0});
  G g;
  auto out = add(g.input({4, 3}, V(12, 1.0)), g.param(b));
  g.backward(sum(out));
  EXPECT_EQ(b.grad, (V{4, 4, 4}));
}

TEST(Ops, ShapeAndAxisErrors) {
  G g;
  auto a = g.input({2, 3}, V(6, 1));
  auto b = g.input({4, 2}, V(8, 1));
  expect_error(ErrorCode::kShapeMismatch, [&] { matmul(a, b); });
  expect_error(ErrorCode::kShapeMismatch, [&] { add(a, b); });
  expect_error(ErrorCode::kAxisOutOfRange, [&] { max_reduce(a, 2); });
  expect_error(ErrorCode::kShapeMismatch, [&] { slice(a, 1, 2, 2); });
  expect_error(ErrorCode::kShapeMismatch, [&] { g.input({3}, V(2, 0)); });
}

TEST(Ops, ConcatSliceReshapeTranspose) {
  G g;
  auto a = g.input({2, 2}, {1, 2, 3, 4});
  auto b = g.input({2, 1}, {5, 6});
  auto c = concat({a, b}, 1);
  EXPECT_EQ(values(c), (V{1, 2, 5, 3, 4, 6}));
  EXPECT_EQ(values(slice(c, 1, 1, 2)), (V{2, 5, 4, 6}));
  EXPECT_EQ(values(transpose(c)), (V{1, 3, 2, 4, 5, 6}));
  EXPECT_EQ(reshape(c, {3, 2}).shape(), (Shape{3, 2}));
  const std::vector<std::size_t> idx{1, 1, 0};
  EXPECT_EQ(values(gather_rows(a, idx)), (V{3, 4, 3, 4, 1, 2}));
  EXPECT_EQ(repeat_each(2, 3), (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
}

TEST(Ops, LayerNormAndFiniteness) {
  G g;
  auto y = layer_norm(g.input({2, 4}, {1, 2, 3, 4, -1, 0, 0, 1}));
  double s = 0;
  for (std::size_t i = 0; i < 4; ++i) s += y.value()[i];
  EXPECT_NEAR(s, 0.0, 1e-12);
  auto big = softmax(g.input({3}, {1000, 0, -1000}));
  for (double v : big.value()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(arcosh1p(g.input({1}, {0.0})).value()[0], 0.0);
}

TEST(Backward, NotScalarLoss) {
  G g;
  auto a = g.input({2}, {1, 2});
  expect_error(ErrorCode::kNotScalarLoss, [&] { g.backward(a); });
}

TEST(Backward, EachReachableNodeOnce) {
  ParameterStore<double> store;
  auto& w = store.add("w", {3, 3}, V(9, 0.5));
  G g;
  auto x = g.input({2, 3}, {1, -2, 3, -4, 5, -6});
  auto h = relu(matmul(x, g.param(w)));
  auto shared = mul(h, h);
  auto loss = sum(add(shared, scale(shared, 2.0)));
  g.backward(loss);
  const auto& calls = g.backward_calls();
  ASSERT_EQ(calls.size(), g.size());
  for (std::size_t id = 0; id < g.size(); ++id) {
    EXPECT_LE(calls[id], 1u) << "node " << id;
    if (g.node(id).requires_grad) EXPECT_EQ(calls[id], 1u) << "node " << id;
  }
  EXPECT_EQ(calls[x.id()], 0u);
}

TEST(Backward, GradientsAccumulateAcrossPasses) {
  ParameterStore<double> store;
  auto& x = store.add("x", {1}, {3});
  for (int pass = 0; pass < 2; ++pass) {
    G g;
    auto t = g.param(x);
    g.backward(sum(mul(t, t)));
  }
  EXPECT_EQ(x.grad, V{12});
  store.zero_grad();
  EXPECT_EQ(x.grad, V{0});
}

TEST(Backward, Deterministic) {
  auto run = [] {
    ParameterStore<double> store;
    Rng rng(53);
    V wv(12);
    for (auto& v : wv) v = rng.uniform(-1, 1);
    auto& w = store.add("w", {3, 4}, wv);
    G g;
    auto x = g.input({5, 3}, V(15, 0.3));
    g.backward(sum(softmax(matmul(x, g.param(w)))));
    return w.grad;
  };
  EXPECT_EQ(run(), run());
}

TEST(Gradcheck, AllOpsPass) {
  const auto results = check_all_ops();
  EXPECT_GE(results.size(), 20u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed) << r.name << " err " << r.max_rel_error << " at " << r.worst;
    EXPECT_GE(r.probes, 20u) << r.name;
  }
}

TEST(Gradcheck, DetectsWrongGradient) {
  ParameterStore<double> store;
  auto& x = store.add("x", {3}, {0.3, -0.2, 0.5});
  // The constant copy of x hides half of the true derivative from backward.
  const auto r = check_gradients(
      "wrong", {&x},
      [&](G& g) {
        auto t = g.param(x);
        auto frozen = g.input({3}, V(x.value.begin(), x.value.end()));
        return sum(mul(t, frozen));
      },
      {});
  EXPECT_FALSE(r.passed);
}

TEST(Adam, ZeroGradLeavesParameters) {
  ParameterStore<float> store;
  auto& w = store.add("w", {2}, {1.0f, -2.0f});
  w.grad.assign(2, 0.0f);
  Adam<float> adam({0.1});
  adam.step(store.all());
  EXPECT_EQ(w.value, (std::vector<float>{1.0f, -2.0f}));
}

TEST(Adam, DescendsAndConverges) {
  ParameterStore<double> store;
  auto& w = store.add("w", {1}, {1.0});
  Adam<double> one({1e-3});
  w.grad = {2.0};
  one.step(store.all());
  EXPECT_LT(w.value[0], 1.0);

  auto& q = store.add("q", {2}, {1.5, -2.0});
  Adam<double> adam({0.05});
  auto loss = [&] { return q.value[0] * q.value[0] + 3.0 * q.value[1] * q.value[1]; };
  for (int i = 0; i < 200; ++i) {
    q.grad = {2.0 * q.value[0], 6.0 * q.value[1]};
    adam.step({&q});
  }
  EXPECT_LT(loss(), 1e-4);
}

TEST(Adam, MissingGrad) {
  ParameterStore<double> store;
  auto& w = store.add("w", {1}, {1.0});
  Adam<double> adam;
  expect_error(ErrorCode::kMissingGrad, [&] { adam.step({&w}); });
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Checkpoint, SaveLoadSaveByteIdentical) {
  const auto dir = testing::scratch_dir("checkpoint");
  ParameterStore<float> a;
  a.add("generator.w", {2, 3}, {1, 2, 3, 4, 5, 6});
  a.add("upsampler1.b", {4}, {-1, 0.5f, 0.25f, 8});
  a.add("upsampler2.s", {}, {3});
  save_parameters(dir / "a.gfck", a);
  ParameterStore<float> b;
  b.add("generator.w", {2, 3}, std::vector<float>(6, 0));
  b.add("upsampler1.b", {4}, std::vector<float>(4, 0));
  b.add("upsampler2.s", {}, {0});
  load_parameters(dir / "a.gfck", b);
  EXPECT_EQ(b.find("upsampler1.b")->value, a.find("upsampler1.b")->value);
  save_parameters(dir / "b.gfck", b);
  EXPECT_EQ(slurp(dir / "a.gfck"), slurp(dir / "b.gfck"));
  const auto bytes = slurp(dir / "a.gfck");
  EXPECT_EQ(bytes.substr(0, 4), "GFCK");
}

TEST(Checkpoint, RejectsMismatch) {
  const auto dir = testing::scratch_dir("checkpoint_bad");
  ParameterStore<float> a;
  a.add("w", {2}, {1, 2});
  save_parameters(dir / "a.gfck", a);
  ParameterStore<float> b;
  b.add("w", {3}, {0, 0, 0});
  EXPECT_THROW(load_parameters(dir / "a.gfck", b), Error);
  std::ofstream(dir / "junk.gfck") << "nope";
  expect_error(ErrorCode::kBadFormat, [&] { read_checkpoint(dir / "junk.gfck"); });
}

}  // namespace
}  // namespace tripoint::ad
