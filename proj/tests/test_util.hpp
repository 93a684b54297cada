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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "tripoint/geometry.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::testing {

inline PointCloud random_cloud(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(lo, hi);
    const double y = rng.uniform(lo, hi);
    const double z = rng.uniform(lo, hi);
    c.points.push_back({x, y, z});
  }
  return c;
}

inline std::vector<Point3> sorted_points(const PointCloud& c) {
  std::vector<Point3> v = c.points;
  std::sort(v.begin(), v.end());
  return v;
}

inline bool set_equal(const PointCloud& a, const PointCloud& b) {
  auto va = sorted_points(a);
  auto vb = sorted_points(b);
  va.erase(std::unique(va.begin(), va.end()), va.end());
  vb.erase(std::unique(vb.begin(), vb.end()), vb.end());
  return va == vb;
}

inline bool contains(const PointCloud& c, const Point3& p) {
  return std::find(c.begin(), c.end(), p) != c.end();
}

inline bool subset_of(const PointCloud& a, const PointCloud& b) {
  return std::all_of(a.begin(), a.end(), [&](const Point3& p) { return contains(b, p); });
}

inline PointCloud permuted(const PointCloud& c, Rng& rng, std::vector<std::size_t>* perm = nullptr) {
  std::vector<std::size_t> idx(c.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  if (perm != nullptr) *perm = idx;
  return select(c, idx);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tripoint_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tripoint::testing
