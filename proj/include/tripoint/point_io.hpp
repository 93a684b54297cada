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

#include <filesystem>

#include "tripoint/geometry.hpp"

namespace tripoint::io {

// ASCII ".xyz": one "x y z" line per point, LF endings, no header.
PointCloud read_xyz(const std::filesystem::path& path);
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);

// Binary ".pcb": "PCB1", uint32 count, count x 3 float32, little-endian.
PointCloud read_pcb(const std::filesystem::path& path);
void write_pcb(const std::filesystem::path& path, const PointCloud& cloud);

bool is_cloud_file(const std::filesystem::path& path);

// Dispatch on the file extension (.xyz or .pcb).
PointCloud read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace tripoint::io
