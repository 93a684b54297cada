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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tripoint {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend auto operator<=>(const Point3&, const Point3&) = default;
};

// Ordered point list. Order is significant for storage only; geometric results
// of the operations below never depend on it beyond exact-tie breaking.
struct PointCloud {
  std::vector<Point3> points;

  PointCloud() = default;
  explicit PointCloud(std::vector<Point3> pts) : points(std::move(pts)) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Point3& operator[](std::size_t i) const { return points[i]; }
  Point3& operator[](std::size_t i) { return points[i]; }
  auto begin() const { return points.begin(); }
  auto end() const { return points.end(); }

  bool all_finite() const;
};

// Coordinates split per axis, the layout the distance kernels consume.
struct CloudSoA {
  std::vector<double> x, y, z;

  explicit CloudSoA(const PointCloud& cloud);
  std::size_t size() const { return x.size(); }
};

struct AxisBox {
  Point3 min;
  Point3 max;

  double max_extent() const;
};

AxisBox bounding_box(const PointCloud& cloud);

struct CanonicalCloud {
  PointCloud cloud;
  double scale = 1.0;  // s = 1 / max axis extent
  Point3 offset;       // bounding-box minimum of the input
};

// Translate the bounding-box minimum to the origin and scale uniformly so the
// longest axis spans exactly [0, 1].
CanonicalCloud normalize_canonical(const PointCloud& cloud);

// Inverse of normalize_canonical for a cloud expressed in canonical space.
PointCloud denormalize(const PointCloud& canonical, double scale, const Point3& offset);

// First index chosen by a farthest point sampler seeded with `seed`.
std::size_t fps_start_index(std::size_t n, std::uint64_t seed);

// Farthest point sampling from an explicit first index. Each later pick
// maximizes the distance to the chosen set, lowest index on ties; a point is
// never picked twice.
std::vector<std::size_t> farthest_point_indices(const PointCloud& cloud, std::size_t m,
                                                std::size_t first);
PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t m, std::uint64_t seed);

// Index of the lexicographically smallest point; an order-independent start
// for samplers that must be permutation invariant.
std::size_t lexicographic_min_index(const PointCloud& cloud);

struct NeighborGraph {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<std::size_t> indices;  // n x k, row-major

  std::span<const std::size_t> row(std::size_t i) const {
    return {indices.data() + i * k, k};
  }
};

// k nearest neighbors of every point (self excluded), ordered by ascending
// distance then index. Requires N > k >= 1.
NeighborGraph knn_graph(const PointCloud& cloud, std::size_t k);

// k nearest reference points for each query (a query coinciding with a
// reference point keeps it). Requires |reference| >= k >= 1.
NeighborGraph knn_query(const PointCloud& reference, const PointCloud& queries, std::size_t k);

PointCloud concat(const PointCloud& a, const PointCloud& b);
PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices);

// Farthest point resampling of a ∪ b down to m points.
PointCloud merge_resample(const PointCloud& a, const PointCloud& b, std::size_t m,
                          std::uint64_t seed);

}  // namespace tripoint
