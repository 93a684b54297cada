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

#include "tripoint/ccm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "tripoint/binary_io.hpp"
#include "tripoint/error.hpp"

namespace tripoint::ccm {

namespace {

constexpr double kRangeSlack = 1e-6;
constexpr std::size_t kNoOwner = std::numeric_limits<std::size_t>::max();

std::size_t pixel_index(double coord, std::size_t extent) {
  const double scaled = std::floor(coord * static_cast<double>(extent));
  if (scaled <= 0.0) return 0;
  const auto idx = static_cast<std::size_t>(scaled);
  return std::min(idx, extent - 1);
}

void check_normalized(const PointCloud& cloud) {
  for (const auto& p : cloud) {
    for (double c : {p.x, p.y, p.z}) {
      if (!(c >= -kRangeSlack && c <= 1.0 + kRangeSlack)) {
        throw Error(ErrorCode::kNotNormalized,
                    "coordinate " + std::to_string(c) + " outside the unit cube");
      }
    }
  }
}

}  // namespace

std::array<double, 3> CameraPose::to_camera(const Point3& p) const {
  std::array<double, 3> out{};
  for (int r = 0; r < 3; ++r) {
    out[r] = rotation[r][0] * p.x + rotation[r][1] * p.y + rotation[r][2] * p.z + translation[r];
  }
  return out;
}

const std::array<CameraPose, 3>& canonical_views() {
  static const std::array<CameraPose, 3> views = {
      // front: (u, v, depth) = (x, y, z)
      CameraPose{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, {0, 0, 0}},
      // right: (u, v, depth) = (1 - z, y, x)
      CameraPose{{{{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}}, {1, 0, 0}},
      // top: (u, v, depth) = (x, 1 - z, y)
      CameraPose{{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}}, {0, 1, 0}},
  };
  return views;
}

std::size_t Ccm::covered_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::array<std::size_t, 2> project_pixel(const CameraPose& pose, const Point3& p,
                                         std::size_t height, std::size_t width) {
  const auto cam = pose.to_camera(p);
  // image rows grow downward, so +v is up
  return {pixel_index(1.0 - cam[1], height), pixel_index(cam[0], width)};
}

std::vector<std::size_t> render_owners(const PointCloud& canonical, const CameraPose& pose,
                                       std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw Error(ErrorCode::kBadCount, "empty image");
  check_normalized(canonical);
  std::vector<std::size_t> owner(height * width, kNoOwner);
  std::vector<double> depth(height * width, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const auto [row, col] = project_pixel(pose, canonical[i], height, width);
    const double d = pose.to_camera(canonical[i])[2];
    const std::size_t px = row * width + col;
    if (d < depth[px]) {  // strict: the earlier point keeps a depth tie
      depth[px] = d;
      owner[px] = i;
    }
  }
  return owner;
}

Ccm render_ccm(const PointCloud& canonical, const CameraPose& pose, std::size_t height,
               std::size_t width) {
  const auto owner = render_owners(canonical, pose, height, width);
  Ccm map;
  map.height = height;
  map.width = width;
  map.pose = pose;
  map.pixels.assign(height * width * 3, 0.0f);
  map.mask.assign(height * width, 0);
  for (std::size_t px = 0; px < owner.size(); ++px) {
    if (owner[px] == kNoOwner) continue;
    const auto& p = canonical[owner[px]];
    map.pixels[px * 3 + 0] = static_cast<float>(p.x);
    map.pixels[px * 3 + 1] = static_cast<float>(p.y);
    map.pixels[px * 3 + 2] = static_cast<float>(p.z);
    map.mask[px] = 1;
  }
  return map;
}

TriPlaneSet render_triplane(const PointCloud& canonical, std::size_t height, std::size_t width) {
  const auto& views = canonical_views();
  return {render_ccm(canonical, views[0], height, width),
          render_ccm(canonical, views[1], height, width),
          render_ccm(canonical, views[2], height, width)};
}

void write_ccm(const std::filesystem::path& path, const Ccm& map) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out.write("CCM1", 4);
  io::le::put(out, static_cast<std::uint32_t>(map.height));
  io::le::put(out, static_cast<std::uint32_t>(map.width));
  for (const auto& row : map.pose.rotation) {
    for (double v : row) io::le::put(out, static_cast<float>(v));
  }
  for (float v : map.pixels) io::le::put(out, v);
  out.write(reinterpret_cast<const char*>(map.mask.data()),
            static_cast<std::streamsize>(map.mask.size()));
}

Ccm read_ccm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, path.string());
  io::le::expect_magic(in, "CCM1");
  Ccm map;
  map.height = io::le::get<std::uint32_t>(in);
  map.width = io::le::get<std::uint32_t>(in);
  for (auto& row : map.pose.rotation) {
    for (double& v : row) v = io::le::get<float>(in);
  }
  // The file stores only the rotation; recover the matching view translation.
  for (const auto& view : canonical_views()) {
    if (view.rotation == map.pose.rotation) map.pose.translation = view.translation;
  }
  map.pixels.resize(map.height * map.width * 3);
  for (float& v : map.pixels) v = io::le::get<float>(in);
  map.mask.resize(map.height * map.width);
  if (!in.read(reinterpret_cast<char*>(map.mask.data()),
               static_cast<std::streamsize>(map.mask.size()))) {
    throw Error(ErrorCode::kBadFormat, "truncated mask in " + path.string());
  }
  return map;
}

void write_ppm(const std::filesystem::path& path, const Ccm& map) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out << "P6\n" << map.width << " " << map.height << "\n255\n";
  std::vector<unsigned char> rgb(map.width * map.height * 3, 0);
  for (std::size_t px = 0; px < map.mask.size(); ++px) {
    if (!map.mask[px]) continue;
    for (int c = 0; c < 3; ++c) {
      const float v = std::clamp(map.pixels[px * 3 + c], 0.0f, 1.0f);
      rgb[px * 3 + c] = static_cast<unsigned char>(std::lround(255.0f * v));
    }
  }
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

}  // namespace tripoint::ccm
