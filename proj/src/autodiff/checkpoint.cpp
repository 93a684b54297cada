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

#include "tripoint/autodiff/checkpoint.hpp"

#include <fstream>

#include "tripoint/binary_io.hpp"
#include "tripoint/error.hpp"

namespace tripoint::ad {

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<CheckpointTensor>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  out.write("GFCK", 4);
  io::le::put(out, kCheckpointVersion);
  io::le::put(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.name.size() > 0xffff || t.shape.size() > 0xff || t.data.size() != numel(t.shape)) {
      throw Error(ErrorCode::kBadFormat, "tensor " + t.name + " cannot be serialized");
    }
    io::le::put(out, static_cast<std::uint16_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    io::le::put(out, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) io::le::put(out, static_cast<std::uint32_t>(d));
    for (float v : t.data) io::le::put(out, v);
  }
  if (!out) throw Error(ErrorCode::kUnreadableFile, "short write to " + path.string());
}

std::vector<CheckpointTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, path.string());
  io::le::expect_magic(in, "GFCK");
  const auto version = io::le::get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kBadFormat, "checkpoint version " + std::to_string(version));
  }
  const auto count = io::le::get<std::uint32_t>(in);
  std::vector<CheckpointTensor> tensors(count);
  for (auto& t : tensors) {
    const auto len = io::le::get<std::uint16_t>(in);
    t.name.resize(len);
    if (!in.read(t.name.data(), len)) throw Error(ErrorCode::kBadFormat, "truncated name");
    const auto ndim = io::le::get<std::uint8_t>(in);
    for (std::uint8_t d = 0; d < ndim; ++d) t.shape.push_back(io::le::get<std::uint32_t>(in));
    t.data.resize(numel(t.shape));
    for (float& v : t.data) v = io::le::get<float>(in);
  }
  return tensors;
}

template <typename T>
std::vector<CheckpointTensor> snapshot(const ParameterStore<T>& store) {
  std::vector<CheckpointTensor> out;
  for (const auto* p : store.all()) {
    CheckpointTensor t{p->name, p->shape, {}};
    t.data.reserve(p->value.size());
    for (T v : p->value) t.data.push_back(static_cast<float>(v));
    out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
void restore(ParameterStore<T>& store, const std::vector<CheckpointTensor>& tensors) {
  if (tensors.size() != store.size()) {
    throw Error(ErrorCode::kConfigMismatch, "checkpoint holds " + std::to_string(tensors.size()) +
                                                " tensors, model has " +
                                                std::to_string(store.size()));
  }
  for (const auto& t : tensors) {
    auto* p = store.find(t.name);
    if (p == nullptr) throw Error(ErrorCode::kConfigMismatch, "unknown tensor " + t.name);
    if (p->shape != t.shape) {
      throw Error(ErrorCode::kConfigMismatch, t.name + ": checkpoint shape " +
                                                  shape_string(t.shape) + " vs model " +
                                                  shape_string(p->shape));
    }
    for (std::size_t i = 0; i < t.data.size(); ++i) p->value[i] = static_cast<T>(t.data[i]);
  }
}

template std::vector<CheckpointTensor> snapshot(const ParameterStore<float>&);
template std::vector<CheckpointTensor> snapshot(const ParameterStore<double>&);
template void restore(ParameterStore<float>&, const std::vector<CheckpointTensor>&);
template void restore(ParameterStore<double>&, const std::vector<CheckpointTensor>&);

}  // namespace tripoint::ad
