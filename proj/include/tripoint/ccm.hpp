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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tripoint/geometry.hpp"

namespace tripoint::ccm {

// Orthographic camera. Rows of `rotation` are the camera right, up and depth
// axes in canonical coordinates. Camera coordinates are R * p + t with t chosen
// so the unit cube maps onto itself.
struct CameraPose {
  std::array<std::array<double, 3>, 3> rotation{};
  std::array<double, 3> translation{};

  std::array<double, 3> to_camera(const Point3& p) const;
};

enum class View { kFront = 0, kRight = 1, kTop = 2 };

// Fixed front (depth = z), right (depth = x) and top (depth = y) views.
const std::array<CameraPose, 3>& canonical_views();

// Canonical coordinate map: pixel colors are the canonical coordinates of the
// nearest point landing on the pixel. Uncovered pixels hold 0 on all channels
// and mask = 0.
struct Ccm {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> pixels;        // height x width x 3, row-major
  std::vector<std::uint8_t> mask;   // height x width
  CameraPose pose;

  std::array<float, 3> color(std::size_t row, std::size_t col) const {
    const float* p = pixels.data() + (row * width + col) * 3;
    return {p[0], p[1], p[2]};
  }
  bool covered(std::size_t row, std::size_t col) const { return mask[row * width + col] != 0; }
  std::size_t covered_count() const;
};

using TriPlaneSet = std::array<Ccm, 3>;

// Pixel hit by a canonical point under a pose: {row, col}.
std::array<std::size_t, 2> project_pixel(const CameraPose& pose, const Point3& p,
                                         std::size_t height, std::size_t width);

// Nearest-wins z-buffer splat, one pixel per point, lowest index on depth ties.
// The cloud must already lie in [0,1]^3 (1e-6 slack).
Ccm render_ccm(const PointCloud& canonical, const CameraPose& pose, std::size_t height,
               std::size_t width);

// Index of the point owning each pixel (or SIZE_MAX) alongside the map.
std::vector<std::size_t> render_owners(const PointCloud& canonical, const CameraPose& pose,
                                       std::size_t height, std::size_t width);

TriPlaneSet render_triplane(const PointCloud& canonical, std::size_t height, std::size_t width);

// ".ccm": "CCM1", uint32 H, uint32 W, 9 float32 pose (row-major),
// H*W*3 float32 pixels, H*W mask bytes. Little-endian.
void write_ccm(const std::filesystem::path& path, const Ccm& map);
Ccm read_ccm(const std::filesystem::path& path);

// Binary P6 visualization; background pixels are black.
void write_ppm(const std::filesystem::path& path, const Ccm& map);

}  // namespace tripoint::ccm
