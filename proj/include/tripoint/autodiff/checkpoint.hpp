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
#include <string>
#include <vector>

#include "tripoint/autodiff/tensor.hpp"

namespace tripoint::ad {

// "GFCK" checkpoint, little-endian: magic, uint32 version (1), uint32 tensor
// count, then per tensor: uint16 name length, UTF-8 name, uint8 ndim,
// ndim x uint32 dims, float32 data.
struct CheckpointTensor {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointTensor>& tensors);
std::vector<CheckpointTensor> read_checkpoint(const std::filesystem::path& path);

// Snapshot / restore a parameter store in registration order. Loading checks
// that every stored tensor matches a parameter by name and shape.
template <typename T>
std::vector<CheckpointTensor> snapshot(const ParameterStore<T>& store);
template <typename T>
void restore(ParameterStore<T>& store, const std::vector<CheckpointTensor>& tensors);

template <typename T>
void save_parameters(const std::filesystem::path& path, const ParameterStore<T>& store) {
  write_checkpoint(path, snapshot(store));
}
template <typename T>
void load_parameters(const std::filesystem::path& path, ParameterStore<T>& store) {
  restore(store, read_checkpoint(path));
}

}  // namespace tripoint::ad
