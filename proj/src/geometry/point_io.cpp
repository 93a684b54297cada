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

#include "tripoint/point_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "tripoint/binary_io.hpp"
#include "tripoint/error.hpp"

namespace tripoint::io {
namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  return out;
}

void append_number(std::string& line, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, end);
}

}  // namespace

PointCloud read_xyz(const fs::path& path) {
  auto in = open_in(path);
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (double& c : v) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      auto [next, ec] = std::from_chars(p, end, c);
      if (ec != std::errc()) {
        throw Error(ErrorCode::kBadFormat,
                    path.string() + ":" + std::to_string(line_no) + ": expected three floats");
      }
      p = next;
    }
    cloud.points.push_back({v[0], v[1], v[2]});
  }
  return cloud;
}

void write_xyz(const fs::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  std::string line;
  for (const auto& p : cloud) {
    line.clear();
    append_number(line, p.x);
    line.push_back(' ');
    append_number(line, p.y);
    line.push_back(' ');
    append_number(line, p.z);
    line.push_back('\n');
    out << line;
  }
}

PointCloud read_pcb(const fs::path& path) {
  auto in = open_in(path);
  le::expect_magic(in, "PCB1");
  const auto count = le::get<std::uint32_t>(in);
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const float x = le::get<float>(in);
    const float y = le::get<float>(in);
    const float z = le::get<float>(in);
    cloud.points.push_back({x, y, z});
  }
  return cloud;
}

void write_pcb(const fs::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  out.write("PCB1", 4);
  le::put(out, static_cast<std::uint32_t>(cloud.size()));
  for (const auto& p : cloud) {
    le::put(out, static_cast<float>(p.x));
    le::put(out, static_cast<float>(p.y));
    le::put(out, static_cast<float>(p.z));
  }
}

bool is_cloud_file(const fs::path& path) {
  const auto ext = path.extension();
  return ext == ".xyz" || ext == ".pcb";
}

PointCloud read_cloud(const fs::path& path) {
  if (path.extension() == ".xyz") return read_xyz(path);
  if (path.extension() == ".pcb") return read_pcb(path);
  throw Error(ErrorCode::kUnreadableFile, "unsupported cloud format: " + path.string());
}

void write_cloud(const fs::path& path, const PointCloud& cloud) {
  if (path.extension() == ".pcb") {
    write_pcb(path, cloud);
  } else {
    write_xyz(path, cloud);
  }
}

}  // namespace tripoint::io
