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
#include <filesystem>
#include <string>
#include <string_view>

#include "tripoint/network/config.hpp"
#include "tripoint/pipeline/synth.hpp"

namespace tripoint::pipeline {

struct RunConfig {
  net::ModelConfig model = net::ModelConfig::toy();
  std::uint64_t seed = 1;
  std::size_t iterations = 500;
  double lr = 2e-3;
  // Cosine decay of the learning rate to zero over `iterations` when true.
  bool cosine_lr = true;
  std::size_t batch_size = 1;
  SynthSpec synth;
  // Directory with partial/ and gt/ subdirectories; synthetic data when empty.
  std::filesystem::path dataset;
  std::filesystem::path output_dir = "run";
  // Train on one fixed synthetic shape instead of a fresh one per sample.
  bool fixed_shape = true;
  std::size_t checkpoint_every = 0;  // 0: final checkpoint only
  std::size_t eval_every = 0;        // 0: no held-out evaluation

  void validate() const;
};

// Applies one `key = value` setting; throws InvalidConfig on unknown keys or
// malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Parses `key = value` lines; `#` starts a comment.
void apply_config_text(RunConfig& cfg, std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Serializes every key, readable by apply_config_text.
std::string to_text(const RunConfig& cfg);

}  // namespace tripoint::pipeline
