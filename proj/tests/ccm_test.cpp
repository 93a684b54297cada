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

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "test_util.hpp"
#include "tripoint/ccm.hpp"
#include "tripoint/error.hpp"

namespace tripoint::ccm {
namespace {

using Mat = std::array<std::array<double, 3>, 3>;

TEST(Views, Orthonormal) {
  for (const auto& pose : canonical_views()) {
    const Mat& r = pose.rotation;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double rtr = 0.0;
        for (int k = 0; k < 3; ++k) rtr += r[k][i] * r[k][j];
        EXPECT_NEAR(rtr, i == j ? 1.0 : 0.0, 1e-12);
      }
    }
    const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                       r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                       r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    EXPECT_EQ(det, 1.0);
  }
}

TEST(Views, ForwardAxesMutuallyOrthogonal) {
  const auto& v = canonical_views();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += v[a].rotation[2][k] * v[b].rotation[2][k];
      EXPECT_EQ(dot, a == b ? 1.0 : 0.0);
    }
  }
}

TEST(Views, FrontIsIdentityProjection) {
  const auto cam = canonical_views()[0].to_camera({0.1, 0.2, 0.3});
  EXPECT_EQ(cam[0], 0.1);
  EXPECT_EQ(cam[1], 0.2);
  EXPECT_EQ(cam[2], 0.3);
}

TEST(Render, SinglePointColor) {
  const auto map = render_ccm(PointCloud({{0.25, 0.5, 1.0}}), canonical_views()[0], 4, 4);
  EXPECT_EQ(map.covered_count(), 1u);
  // u = floor(0.25 * 4) = 1, v: row = floor((1 - 0.5) * 4) = 2
  ASSERT_TRUE(map.covered(2, 1));
  EXPECT_EQ(map.color(2, 1), (std::array<float, 3>{0.25f, 0.5f, 1.0f}));
}

TEST(Render, NearestDepthWins) {
  const PointCloud c({{0.5, 0.5, 0.8}, {0.5, 0.5, 0.2}});
  const auto map = render_ccm(c, canonical_views()[0], 4, 4);
  EXPECT_EQ(map.covered_count(), 1u);
  EXPECT_EQ(map.color(2, 2)[2], 0.2f);
}

TEST(Render, DepthTieKeepsLowerIndex) {
  const PointCloud c({{0.50, 0.5, 0.4}, {0.51, 0.5, 0.4}});
  const auto map = render_ccm(c, canonical_views()[0], 4, 4);
  EXPECT_EQ(map.color(2, 2)[0], 0.5f);
}

TEST(Render, LeftHalfLeavesRightHalfEmpty) {
  Rng rng(31);
  auto c = testing::random_cloud(rng, 300);
  for (auto& p : c.points) p.x *= 0.49;
  const std::size_t h = 16, w = 16;
  const auto map = render_ccm(c, canonical_views()[0], h, w);
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (const auto& p : c) {
    const auto col = static_cast<std::size_t>(std::floor(p.x * w));
    const auto row = static_cast<std::size_t>(std::floor((1.0 - p.y) * h));
    expected.insert({std::min(row, h - 1), std::min(col, w - 1)});
  }
  EXPECT_EQ(map.covered_count(), expected.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t col = w / 2; col < w; ++col) {
      EXPECT_FALSE(map.covered(r, col));
      EXPECT_EQ(map.color(r, col), (std::array<float, 3>{0, 0, 0}));
    }
  }
}

TEST(Render, RejectsUnnormalized) {
  try {
    render_ccm(PointCloud({{0.5, 1.1, 0.5}}), canonical_views()[0], 4, 4);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotNormalized);
  }
}

TEST(Triplane, OnePointSharedColor) {
  const auto t = render_triplane(PointCloud({{0.3, 0.6, 0.9}}), 8, 8);
  std::array<float, 3> seen{};
  for (const auto& m : t) {
    ASSERT_EQ(m.covered_count(), 1u);
    for (std::size_t px = 0; px < 64; ++px) {
      if (m.mask[px]) {
        std::array<float, 3> c{m.pixels[px * 3], m.pixels[px * 3 + 1], m.pixels[px * 3 + 2]};
        if (&m == &t[0]) seen = c;
        EXPECT_EQ(c, seen);
      }
    }
  }
}

TEST(Triplane, CubeCornersHandEnumerated) {
  PointCloud c;
  for (int i = 0; i < 8; ++i) c.points.push_back({double(i & 1), double((i >> 1) & 1), double(i >> 2)});
  const auto t = render_triplane(c, 8, 8);
  // Every view sees four corner pixels; the winner is the corner on the near face.
  for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(t[v].covered_count(), 4u);
  for (std::size_t r : {0u, 7u}) {
    for (std::size_t col : {0u, 7u}) {
      EXPECT_TRUE(t[0].covered(r, col));
      EXPECT_EQ(t[0].color(r, col)[2], 0.0f);  // front: depth z
      EXPECT_EQ(t[1].color(r, col)[0], 0.0f);  // right: depth x
      EXPECT_EQ(t[2].color(r, col)[1], 0.0f);  // top: depth y
    }
  }
  EXPECT_EQ(t[0].color(0, 7), (std::array<float, 3>{1, 1, 0}));
}

TEST(Triplane, DiagonalPointsConsistentAcrossViews) {
  const PointCloud c({{0.1, 0.1, 0.1}, {0.5, 0.5, 0.5}, {0.9, 0.9, 0.9}});
  const auto t = render_triplane(c, 8, 8);
  for (std::size_t v = 0; v < 3; ++v) {
    const auto owners = render_owners(c, canonical_views()[v], 8, 8);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto [r, col] = project_pixel(canonical_views()[v], c[i], 8, 8);
      ASSERT_EQ(owners[r * 8 + col], i);
      EXPECT_EQ(t[v].color(r, col),
                (std::array<float, 3>{float(c[i].x), float(c[i].y), float(c[i].z)}));
    }
  }
}

TEST(Render, ResolutionMonotoneAndDeterministic) {
  Rng rng(32);
  const auto c = testing::random_cloud(rng, 500);
  std::size_t prev = 0;
  for (std::size_t res : {4u, 8u, 16u, 32u, 64u}) {
    const auto m = render_ccm(c, canonical_views()[1], res, res);
    EXPECT_GE(m.covered_count(), prev);
    prev = m.covered_count();
    const auto again = render_ccm(c, canonical_views()[1], res, res);
    EXPECT_EQ(std::memcmp(m.pixels.data(), again.pixels.data(), m.pixels.size() * 4), 0);
    EXPECT_EQ(m.mask, again.mask);
  }
}

TEST(Render, CoveredValuesInUnitRange) {
  Rng rng(33);
  const auto c = testing::random_cloud(rng, 400);
  for (const auto& m : render_triplane(c, 24, 24)) {
    for (std::size_t px = 0; px < m.mask.size(); ++px) {
      for (int k = 0; k < 3; ++k) {
        const float v = m.pixels[px * 3 + k];
        if (m.mask[px]) {
          EXPECT_TRUE(v >= 0.0f && v <= 1.0f);
        } else {
          EXPECT_EQ(v, 0.0f);
        }
      }
    }
  }
}

TEST(CcmFile, RoundTripAndPpm) {
  const auto dir = testing::scratch_dir("ccmfile");
  Rng rng(34);
  const auto m = render_ccm(testing::random_cloud(rng, 100), canonical_views()[2], 12, 10);
  write_ccm(dir / "m.ccm", m);
  const auto r = read_ccm(dir / "m.ccm");
  EXPECT_EQ(r.height, 12u);
  EXPECT_EQ(r.width, 10u);
  EXPECT_EQ(r.pixels, m.pixels);
  EXPECT_EQ(r.mask, m.mask);
  EXPECT_EQ(r.pose.rotation, m.pose.rotation);
  EXPECT_EQ(std::filesystem::file_size(dir / "m.ccm"), 4u + 8u + 36u + 12u * 10u * 13u);
  write_ppm(dir / "m.ppm", m);
  std::ifstream in(dir / "m.ppm", std::ios::binary);
  std::string magic;
  in >> magic;
  EXPECT_EQ(magic, "P6");
}

}  // namespace
}  // namespace tripoint::ccm
