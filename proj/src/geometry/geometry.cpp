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

#include "tripoint/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tripoint/error.hpp"
#include "tripoint/rng.hpp"
#include "tripoint/simd.hpp"

namespace tripoint {

bool PointCloud::all_finite() const {
  return std::all_of(points.begin(), points.end(), [](const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
  });
}

CloudSoA::CloudSoA(const PointCloud& cloud) {
  x.reserve(cloud.size());
  y.reserve(cloud.size());
  z.reserve(cloud.size());
  for (const auto& p : cloud) {
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
  }
}

double AxisBox::max_extent() const {
  return std::max({max.x - min.x, max.y - min.y, max.z - min.z});
}

AxisBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "bounding box of an empty cloud");
  AxisBox box{cloud[0], cloud[0]};
  for (const auto& p : cloud) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.min.z = std::min(box.min.z, p.z);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
    box.max.z = std::max(box.max.z, p.z);
  }
  return box;
}

CanonicalCloud normalize_canonical(const PointCloud& cloud) {
  const AxisBox box = bounding_box(cloud);
  const double extent = box.max_extent();
  if (!(extent > 0.0)) {
    throw Error(ErrorCode::kDegenerateExtent, "all points coincide");
  }
  CanonicalCloud out;
  out.scale = 1.0 / extent;
  out.offset = box.min;
  out.cloud.points.reserve(cloud.size());
  // Divide rather than multiply by the scale: extent / extent is exactly 1,
  // which makes a second normalization pass the identity.
  for (const auto& p : cloud) {
    out.cloud.points.push_back(
        {(p.x - box.min.x) / extent, (p.y - box.min.y) / extent, (p.z - box.min.z) / extent});
  }
  return out;
}

PointCloud denormalize(const PointCloud& canonical, double scale, const Point3& offset) {
  PointCloud out;
  out.points.reserve(canonical.size());
  for (const auto& p : canonical) {
    out.points.push_back({p.x / scale + offset.x, p.y / scale + offset.y, p.z / scale + offset.z});
  }
  return out;
}

std::size_t fps_start_index(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "fps.start");
  return rng.index(n);
}

std::vector<std::size_t> farthest_point_indices(const PointCloud& cloud, std::size_t m,
                                                std::size_t first) {
  const std::size_t n = cloud.size();
  if (m == 0 || m > n) {
    throw Error(ErrorCode::kBadCount,
                "cannot sample " + std::to_string(m) + " of " + std::to_string(n) + " points");
  }
  if (first >= n) throw Error(ErrorCode::kBadCount, "start index out of range");

  const CloudSoA soa(cloud);
  const auto& k = simd::active();
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<double> row(n);
  std::vector<std::size_t> chosen;
  chosen.reserve(m);
  std::size_t current = first;
  for (std::size_t step = 0; step < m; ++step) {
    chosen.push_back(current);
    min_dist[current] = -1.0;  // never chosen again
    if (step + 1 == m) break;
    k.sqdist_row_f64(cloud[current].x, cloud[current].y, cloud[current].z, soa.x.data(),
                     soa.y.data(), soa.z.data(), n, row.data());
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (min_dist[j] < 0.0) continue;
      min_dist[j] = std::min(min_dist[j], row[j]);
      if (min_dist[j] > best_d) {
        best_d = min_dist[j];
        best = j;
      }
    }
    current = best;
  }
  return chosen;
}

PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t m, std::uint64_t seed) {
  if (cloud.empty() || m == 0 || m > cloud.size()) {
    throw Error(ErrorCode::kBadCount, "cannot sample " + std::to_string(m) + " of " +
                                          std::to_string(cloud.size()) + " points");
  }
  const auto idx = farthest_point_indices(cloud, m, fps_start_index(cloud.size(), seed));
  return select(cloud, idx);
}

std::size_t lexicographic_min_index(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "no points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    if (cloud[i] < cloud[best]) best = i;
  }
  return best;
}

namespace {

// Select the k smallest (distance, index) pairs from one distance row.
void k_smallest(std::span<const double> dist, std::size_t skip, std::size_t k,
                std::vector<std::size_t>& scratch, std::size_t* out) {
  scratch.clear();
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != skip) scratch.push_back(j);
  }
  auto less = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                    scratch.end(), less);
  std::copy_n(scratch.begin(), k, out);
}

}  // namespace

NeighborGraph knn_graph(const PointCloud& cloud, std::size_t k) {
  const std::size_t n = cloud.size();
  if (k == 0 || n <= k) {
    throw Error(ErrorCode::kTooFewPoints,
                "knn needs N > k, got N=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  const CloudSoA soa(cloud);
  const auto& kern = simd::active();
  NeighborGraph graph{k, n, std::vector<std::size_t>(n * k)};
  std::vector<double> row(n);
  std::vector<std::size_t> scratch;
  scratch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    kern.sqdist_row_f64(cloud[i].x, cloud[i].y, cloud[i].z, soa.x.data(), soa.y.data(),
                        soa.z.data(), n, row.data());
    k_smallest(row, i, k, scratch, graph.indices.data() + i * k);
  }
  return graph;
}

NeighborGraph knn_query(const PointCloud& reference, const PointCloud& queries, std::size_t k) {
  const std::size_t n = reference.size();
  if (k == 0 || n < k) {
    throw Error(ErrorCode::kTooFewPoints,
                "knn query needs |reference| >= k, got " + std::to_string(n));
  }
  const CloudSoA soa(reference);
  const auto& kern = simd::active();
  NeighborGraph graph{k, queries.size(), std::vector<std::size_t>(queries.size() * k)};
  std::vector<double> row(n);
  std::vector<std::size_t> scratch;
  scratch.reserve(n);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    kern.sqdist_row_f64(queries[i].x, queries[i].y, queries[i].z, soa.x.data(), soa.y.data(),
                        soa.z.data(), n, row.data());
    k_smallest(row, n, k, scratch, graph.indices.data() + i * k);
  }
  return graph;
}

PointCloud concat(const PointCloud& a, const PointCloud& b) {
  PointCloud out;
  out.points.reserve(a.size() + b.size());
  out.points.insert(out.points.end(), a.begin(), a.end());
  out.points.insert(out.points.end(), b.begin(), b.end());
  return out;
}

PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(cloud[i]);
  return out;
}

PointCloud merge_resample(const PointCloud& a, const PointCloud& b, std::size_t m,
                          std::uint64_t seed) {
  if (m == 0 || a.size() + b.size() < m) {
    throw Error(ErrorCode::kBadCount, "merge target " + std::to_string(m) + " exceeds " +
                                          std::to_string(a.size() + b.size()) + " points");
  }
  return farthest_point_sample(concat(a, b), m, seed);
}

}  // namespace tripoint
