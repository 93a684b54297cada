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

#include "oracles.hpp"
#include "test_util.hpp"
#include "tripoint/error.hpp"
#include "tripoint/metrics.hpp"

namespace tripoint::metrics {
namespace {

using testing::random_cloud;

TEST(Chamfer, Singletons) {
  const PointCloud p({{0, 0, 0}}), q({{1, 0, 0}});
  EXPECT_EQ(chamfer(p, q, ChamferOrder::kL2), 2.0);
  EXPECT_EQ(chamfer(p, q, ChamferOrder::kL1), 1.0);
}

TEST(Chamfer, IdentityAndSymmetry) {
  Rng rng(41);
  const auto p = random_cloud(rng, 48), q = random_cloud(rng, 56);
  EXPECT_EQ(chamfer(p, p, ChamferOrder::kL2), 0.0);
  EXPECT_EQ(chamfer(p, p, ChamferOrder::kL1), 0.0);
  EXPECT_EQ(chamfer(p, q, ChamferOrder::kL2), chamfer(q, p, ChamferOrder::kL2));
  EXPECT_EQ(chamfer(p, q, ChamferOrder::kL1), chamfer(q, p, ChamferOrder::kL1));
}

TEST(Chamfer, MatchesBruteForce) {
  Rng rng(42);
  const auto p = random_cloud(rng, 48), q = random_cloud(rng, 56);
  EXPECT_TRUE(oracle::rel_close(chamfer(p, q, ChamferOrder::kL2), oracle::chamfer_l2(p, q), 1e-12));
  EXPECT_TRUE(oracle::rel_close(chamfer(p, q, ChamferOrder::kL1), oracle::chamfer_l1(p, q), 1e-12));
}

TEST(Chamfer, ScaleCovariance) {
  Rng rng(43);
  const auto p = random_cloud(rng, 40), q = random_cloud(rng, 30);
  PointCloud ps, qs;
  for (const auto& a : p) ps.points.push_back({a.x * 4, a.y * 4, a.z * 4});
  for (const auto& a : q) qs.points.push_back({a.x * 4, a.y * 4, a.z * 4});
  EXPECT_TRUE(oracle::rel_close(chamfer(ps, qs, ChamferOrder::kL2),
                                16.0 * chamfer(p, q, ChamferOrder::kL2), 1e-12));
  EXPECT_TRUE(oracle::rel_close(chamfer(ps, qs, ChamferOrder::kL1),
                                4.0 * chamfer(p, q, ChamferOrder::kL1), 1e-12));
}

TEST(Chamfer, EmptyIsError) {
  try {
    chamfer(PointCloud{}, PointCloud({{0, 0, 0}}), ChamferOrder::kL2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCloud);
  }
}

TEST(ArcCd, ClosedForms) {
  EXPECT_EQ(arcosh1p(0.0), 0.0);
  EXPECT_NEAR(arcosh1p(1.0), std::log(2.0 + std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(arcosh1p(1.0), 1.316958, 1e-6);
  const PointCloud p({{0, 0, 0}}), q({{1, 0, 0}});
  EXPECT_EQ(arc_cd(p, p), 0.0);
  EXPECT_EQ(arc_cd(p, q), arcosh1p(2.0));
}

TEST(TotalLoss, SumOfTerms) {
  Rng rng(44);
  const auto gt = random_cloud(rng, 40);
  const auto a = random_cloud(rng, 20), b = random_cloud(rng, 30), c = random_cloud(rng, 50);
  const auto zero = total_loss(gt, gt, gt, gt);
  EXPECT_EQ(zero.total, 0.0);
  const auto same = total_loss(a, a, a, gt);
  EXPECT_NEAR(same.total, 3.0 * arc_cd(a, gt), 1e-15);
  const auto v = total_loss(a, b, c, gt);
  ASSERT_EQ(v.terms.size(), 3u);
  EXPECT_EQ(v.terms[0], arc_cd(a, gt));
  EXPECT_EQ(v.terms[1], arc_cd(b, gt));
  EXPECT_EQ(v.terms[2], arc_cd(c, gt));
  EXPECT_EQ(v.total, v.terms[0] + v.terms[1] + v.terms[2]);
}

TEST(Fscore, Examples) {
  Rng rng(45);
  const auto gt = random_cloud(rng, 30);
  EXPECT_EQ(fscore(gt, gt), 1.0);
  PointCloud far;
  for (const auto& p : gt) far.points.push_back({p.x + 5, p.y, p.z});
  EXPECT_EQ(fscore(far, gt), 0.0);
  // Half of p on gt, half far away; every gt point covered.
  PointCloud half = gt;
  for (const auto& p : gt) half.points.push_back({p.x, p.y + 7, p.z});
  EXPECT_NEAR(fscore(half, gt), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(fscore(half, gt), oracle::fscore(half, gt, kDefaultFscoreThreshold));
  try {
    fscore(gt, gt, 0.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadThreshold);
  }
}

TEST(Dcd, Examples) {
  Rng rng(46);
  const auto p = random_cloud(rng, 32), q = random_cloud(rng, 32);
  EXPECT_EQ(dcd(p, p), 0.0);
  PointCloud far;
  for (const auto& a : p) far.points.push_back({a.x + 10, a.y, a.z});
  EXPECT_NEAR(dcd(far, p), 1.0, 1e-12);
  EXPECT_TRUE(oracle::rel_close(dcd(p, q), oracle::dcd(p, q, kDefaultDcdAlpha), 1e-12));
  EXPECT_EQ(dcd(p, q), dcd(q, p));
  const double v = dcd(p, q);
  EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(Fidelity, Examples) {
  EXPECT_EQ(fidelity(PointCloud({{0, 0, 0}}), PointCloud({{0, 1, 0}})), 1.0);
  Rng rng(47);
  const auto in = random_cloud(rng, 20);
  auto more = in;
  for (const auto& p : random_cloud(rng, 20)) more.points.push_back(p);
  EXPECT_EQ(fidelity(in, more), 0.0);
  const auto c = random_cloud(rng, 25);
  auto c2 = c;
  for (const auto& p : random_cloud(rng, 10)) c2.points.push_back(p);
  EXPECT_LE(fidelity(in, c2), fidelity(in, c));
}

TEST(Mmd, Examples) {
  Rng rng(48);
  const auto c = random_cloud(rng, 20);
  std::vector<PointCloud> refs;
  for (int i = 0; i < 5; ++i) refs.push_back(random_cloud(rng, 25));
  EXPECT_TRUE(oracle::rel_close(mmd(c, refs), oracle::mmd(c, refs), 1e-12));
  std::vector<PointCloud> one{refs[0]};
  EXPECT_EQ(mmd(c, one), chamfer(c, refs[0], ChamferOrder::kL2));
  refs.push_back(c);
  EXPECT_EQ(mmd(c, refs), 0.0);
  try {
    mmd(c, std::span<const PointCloud>{});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyReferenceSet);
  }
}

TEST(NearestField, MatchesBruteForceWithTies) {
  Rng rng(49);
  const auto a = random_cloud(rng, 60);
  auto b = random_cloud(rng, 70);
  b.points.push_back(b[3]);  // duplicate must never win
  const auto f = nearest_field(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto [d, j] = oracle::nearest(a[i], b);
    EXPECT_EQ(f.sqdist[i], d);
    EXPECT_EQ(f.index[i], j);
  }
}

TEST(Report, FieldsAndRanges) {
  Rng rng(50);
  const auto p = random_cloud(rng, 40), gt = random_cloud(rng, 40), part = random_cloud(rng, 10);
  const auto r = evaluate_pair(p, gt, &part);
  ASSERT_TRUE(r.cd_l1 && r.cd_l2 && r.arc_cd && r.dcd && r.fscore && r.fidelity);
  EXPECT_GE(*r.cd_l1, 0.0);
  EXPECT_GE(*r.fscore, 0.0);
  EXPECT_LE(*r.fscore, 1.0);
  EXPECT_LE(*r.dcd, 1.0);
  EXPECT_EQ(r.fscore_threshold, 0.01);
  EXPECT_EQ(r.dcd_alpha, 1000.0);
  EXPECT_TRUE(r.fidelity_squared);
  EXPECT_FALSE(evaluate_pair(p, gt).fidelity.has_value());
}

}  // namespace
}  // namespace tripoint::metrics
