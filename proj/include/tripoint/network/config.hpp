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
#include <cstddef>
#include <string>
#include <vector>

namespace tripoint::net {

// EdgeConv block parameters: input width, output width, neighbor count.
struct EdgeConvSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t neighbors = 0;
};

// One branch of an inception 1-D convolution stack.
struct Conv1dSpec {
  std::size_t kernel = 1;
  std::size_t out = 0;
  std::size_t padding = 0;
};

inline constexpr std::size_t kInceptionWidth = 96;

struct ModelConfig {
  std::size_t c = 64;
  std::size_t n_in = 2048;
  std::size_t n_coarse = 256;
  std::size_t merge_target = 512;
  std::array<std::size_t, 2> up_ratios{2, 2};
  std::array<std::size_t, 2> ccm_hw{64, 64};
  std::array<EdgeConvSpec, 2> edgeconv{{{3, 64, 16}, {64, 128, 16}}};
  std::array<std::vector<Conv1dSpec>, 2> conv1d{
      std::vector<Conv1dSpec>{{1, 32, 0}, {3, 32, 1}, {5, 32, 2}},
      std::vector<Conv1dSpec>{{1, 32, 0}, {3, 32, 1}, {5, 32, 2}}};
  std::size_t heads = 4;
  std::size_t decoder_depth = 2;
  std::size_t group_size = 16;  // neighbors per set-abstraction group

  // Ablation switches.
  bool use_ccm = true;
  bool use_alignment = true;
  bool use_inception = true;

  std::size_t width() const { return 2 * c; }  // attention token width
  std::size_t dense_points() const { return merge_target * up_ratios[0] * up_ratios[1]; }

  // Throws InvalidConfig with the first violated constraint.
  void validate() const;

  static ModelConfig desk();
  // Small configuration used by the overfit and ablation harnesses.
  static ModelConfig toy();
  // Smallest configuration for finite-difference checks.
  static ModelConfig tiny();
};

std::string describe(const ModelConfig& cfg);

}  // namespace tripoint::net
