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

#include "tripoint/pipeline/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tripoint/error.hpp"

namespace tripoint::pipeline {

namespace {

constexpr double kPi = std::numbers::pi;

Point3 on_sphere(Rng& rng, const Point3& center, double radius) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {center.x + radius * s * std::cos(phi), center.y + radius * s * std::sin(phi),
          center.z + radius * z};
}

Point3 on_box(Rng& rng, const Point3& center, const Point3& half) {
  const double ax = half.y * half.z, ay = half.x * half.z, az = half.x * half.y;
  const double pick = rng.uniform(0.0, ax + ay + az);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
  Point3 p;
  if (pick < ax) {
    p = {sign * half.x, u * half.y, v * half.z};
  } else if (pick < ax + ay) {
    p = {u * half.x, sign * half.y, v * half.z};
  } else {
    p = {u * half.x, v * half.y, sign * half.z};
  }
  return {center.x + p.x, center.y + p.y, center.z + p.z};
}

Point3 on_cylinder(Rng& rng, double radius, double height) {
  const double side = 2.0 * kPi * radius * height;
  const double cap = kPi * radius * radius;
  const double pick = rng.uniform(0.0, side + 2.0 * cap);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  if (pick < side) {
    return {radius * std::cos(phi), radius * std::sin(phi), rng.uniform(-0.5, 0.5) * height};
  }
  const double r = radius * std::sqrt(rng.uniform());
  const double z = pick < side + cap ? -0.5 * height : 0.5 * height;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Point3 on_torus(Rng& rng, double major, double minor) {
  // Rejection on the tube angle gives the area density (major + minor cos v).
  for (;;) {
    const double u = rng.uniform(0.0, 2.0 * kPi);
    const double v = rng.uniform(0.0, 2.0 * kPi);
    const double w = (major + minor * std::cos(v)) / (major + minor);
    if (rng.uniform() < w) {
      const double ring = major + minor * std::cos(v);
      return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
    }
  }
}

bool inside_sphere(const Point3& p, const Point3& c, double r) {
  const double dx = p.x - c.x, dy = p.y - c.y, dz = p.z - c.z;
  return dx * dx + dy * dy + dz * dz < r * r;
}

bool inside_box(const Point3& p, const Point3& c, const Point3& h) {
  return std::abs(p.x - c.x) < h.x && std::abs(p.y - c.y) < h.y && std::abs(p.z - c.z) < h.z;
}

Point3 on_union(Rng& rng) {
  const Point3 sc{-0.2, 0.0, 0.0};
  const double sr = 0.35;
  const Point3 bc{0.25, 0.0, 0.0};
  const Point3 bh{0.3, 0.2, 0.25};
  const double sphere_area = 4.0 * kPi * sr * sr;
  const double box_area = 8.0 * (bh.x * bh.y + bh.y * bh.z + bh.x * bh.z);
  for (;;) {
    if (rng.uniform(0.0, sphere_area + box_area) < sphere_area) {
      const auto p = on_sphere(rng, sc, sr);
      if (!inside_box(p, bc, bh)) return p;
    } else {
      const auto p = on_box(rng, bc, bh);
      if (!inside_sphere(p, sc, sr)) return p;
    }
  }
}

}  // namespace

ShapeFamily parse_family(std::string_view name) {
  if (name == "sphere") return ShapeFamily::kSphere;
  if (name == "box") return ShapeFamily::kBox;
  if (name == "cylinder") return ShapeFamily::kCylinder;
  if (name == "torus") return ShapeFamily::kTorus;
  if (name == "union") return ShapeFamily::kUnion;
  throw Error(ErrorCode::kInvalidConfig, "unknown shape family '" + std::string(name) + "'");
}

std::string family_name(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::kSphere: return "sphere";
    case ShapeFamily::kBox: return "box";
    case ShapeFamily::kCylinder: return "cylinder";
    case ShapeFamily::kTorus: return "torus";
    case ShapeFamily::kUnion: return "union";
  }
  return "?";
}

void SynthSpec::validate() const {
  if (gt_points < 2) throw Error(ErrorCode::kInvalidConfig, "gt_points must be at least 2");
  if (partial_points < 1) throw Error(ErrorCode::kInvalidConfig, "partial_points must be positive");
  if (!(occlusion > 0.0 && occlusion < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "occlusion fraction must lie in (0, 1)");
  }
  if (!(jitter >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "jitter must be non-negative");
}

PointCloud sample_surface(ShapeFamily family, std::size_t n, Rng& rng) {
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (family) {
      case ShapeFamily::kSphere:
        cloud.points.push_back(on_sphere(rng, {0.0, 0.0, 0.0}, 0.5));
        break;
      case ShapeFamily::kBox:
        cloud.points.push_back(on_box(rng, {0.0, 0.0, 0.0}, {0.5, 0.35, 0.25}));
        break;
      case ShapeFamily::kCylinder:
        cloud.points.push_back(on_cylinder(rng, 0.35, 1.0));
        break;
      case ShapeFamily::kTorus:
        cloud.points.push_back(on_torus(rng, 0.35, 0.15));
        break;
      case ShapeFamily::kUnion:
        cloud.points.push_back(on_union(rng));
        break;
    }
  }
  return cloud;
}

SynthSample synth_generate(const SynthSpec& spec, std::uint64_t seed, const Plane& plane) {
  spec.validate();
  Rng rng(seed, "synth");
  Rng surface = rng.derive("surface");
  SynthSample out;
  out.plane = plane;
  out.gt = normalize_canonical(sample_surface(spec.family, spec.gt_points, surface)).cloud;

  PointCloud kept;
  for (const auto& p : out.gt) {
    const double d = plane.normal.x * p.x + plane.normal.y * p.y + plane.normal.z * p.z;
    if (d <= plane.offset) kept.points.push_back(p);
  }
  if (kept.size() < spec.partial_points) {
    throw Error(ErrorCode::kDegenerateOcclusion,
                std::to_string(kept.size()) + " points survive the cut, " +
                    std::to_string(spec.partial_points) + " needed");
  }
  out.partial = farthest_point_sample(kept, spec.partial_points,
                                      Rng(seed, "synth.fps").next());
  if (spec.jitter > 0.0) {
    Rng noise = rng.derive("jitter");
    for (auto& p : out.partial.points) {
      p.x += spec.jitter * noise.normal();
      p.y += spec.jitter * noise.normal();
      p.z += spec.jitter * noise.normal();
    }
  }
  return out;
}

SynthSample synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed, "synth.plane");
  Plane plane;
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  plane.normal = {s * std::cos(phi), s * std::sin(phi), z};

  // The offset is the occlusion quantile of the projections, so the cut
  // keeps that fraction of the ground truth.
  Rng surface = Rng(seed, "synth").derive("surface");
  const auto gt = normalize_canonical(sample_surface(spec.family, spec.gt_points, surface)).cloud;
  std::vector<double> proj;
  proj.reserve(gt.size());
  for (const auto& p : gt) {
    proj.push_back(plane.normal.x * p.x + plane.normal.y * p.y + plane.normal.z * p.z);
  }
  const auto k = static_cast<std::size_t>(std::floor(spec.occlusion * static_cast<double>(gt.size())));
  const std::size_t rank = std::min(gt.size() - 1, k == 0 ? 0 : k - 1);
  std::nth_element(proj.begin(), proj.begin() + static_cast<std::ptrdiff_t>(rank), proj.end());
  plane.offset = proj[rank];
  return synth_generate(spec, seed, plane);
}

}  // namespace tripoint::pipeline
