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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tripoint/geometry.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::pipeline {

enum class ShapeFamily { kSphere, kBox, kCylinder, kTorus, kUnion };

ShapeFamily parse_family(std::string_view name);
std::string family_name(ShapeFamily family);

struct SynthSpec {
  ShapeFamily family = ShapeFamily::kUnion;
  std::size_t gt_points = 2048;
  std::size_t partial_points = 512;
  double occlusion = 0.5;  // fraction of the ground truth kept by the cut
  double jitter = 0.0;     // Gaussian sigma added to the partial cloud

  void validate() const;
};

// Points p with dot(normal, p) <= offset survive the cut.
struct Plane {
  Point3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;
};

struct SynthSample {
  PointCloud partial;
  PointCloud gt;
  Plane plane;
};

// Area-uniform samples on the raw surface: a sphere of radius 0.5 at the
// origin, a 1 x 0.7 x 0.5 box, a cylinder (radius 0.35, height 1), a torus
// (radii 0.35 and 0.15), or the outer surface of a sphere overlapping a box.
PointCloud sample_surface(ShapeFamily family, std::size_t n, Rng& rng);

// Ground truth normalized to the canonical cube, cut by a random plane that
// keeps the `occlusion` fraction, then farthest-point resampled to
// `partial_points`.
SynthSample synth_generate(const SynthSpec& spec, std::uint64_t seed);
// Same with a caller-chosen cut plane (in canonical coordinates).
SynthSample synth_generate(const SynthSpec& spec, std::uint64_t seed, const Plane& plane);

}  // namespace tripoint::pipeline
