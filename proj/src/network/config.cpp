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

#include "tripoint/network/config.hpp"

#include <sstream>

#include "tripoint/error.hpp"

namespace tripoint::net {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

}  // namespace

void ModelConfig::validate() const {
  require(c >= 4 && c % 4 == 0, "c must be a positive multiple of 4");
  require(n_in >= 16, "n_in must be at least 16");
  require(n_coarse >= 1, "n_coarse must be positive");
  require(merge_target >= 2, "merge_target must be at least 2");
  require(merge_target <= n_in + n_coarse, "merge_target exceeds the merged point count");
  require(up_ratios[0] >= 1 && up_ratios[1] >= 1, "up_ratios must be positive");
  require(ccm_hw[0] >= 16 && ccm_hw[1] >= 16, "ccm_hw must be at least 16x16");
  require(heads >= 1 && width() % heads == 0, "heads must divide the attention width 2c");
  require(decoder_depth >= 1, "decoder_depth must be positive");
  require(group_size >= 1 && group_size <= n_in / 4, "group_size must lie in [1, n_in/4]");
  require(edgeconv[0].in == 3, "the first EdgeConv consumes xyz (in = 3)");
  require(edgeconv[1].in == edgeconv[0].out, "EdgeConv widths must chain");
  for (const auto& e : edgeconv) {
    require(e.out >= 1, "EdgeConv output width must be positive");
    require(e.neighbors >= 1 && e.neighbors < merge_target,
            "EdgeConv neighbor count must lie in [1, merge_target)");
  }
  for (const auto& branches : conv1d) {
    require(!branches.empty(), "an inception stack needs at least one branch");
    std::size_t total = 0;
    for (const auto& b : branches) {
      require(b.kernel >= 1 && b.out >= 1, "conv1d kernel and width must be positive");
      require(b.kernel == 2 * b.padding + 1, "conv1d padding must preserve length");
      total += b.out;
    }
    require(total == kInceptionWidth, "inception branch widths must sum to 96");
  }
}

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

ModelConfig ModelConfig::toy() {
  ModelConfig cfg;
  cfg.c = 32;
  cfg.n_in = 512;
  cfg.n_coarse = 128;
  cfg.merge_target = 512;
  cfg.ccm_hw = {32, 32};
  cfg.edgeconv = {{{3, 32, 8}, {32, 64, 8}}};
  cfg.decoder_depth = 1;
  cfg.group_size = 8;
  return cfg;
}

ModelConfig ModelConfig::tiny() {
  ModelConfig cfg;
  cfg.c = 8;
  cfg.n_in = 64;
  cfg.n_coarse = 16;
  cfg.merge_target = 32;
  cfg.ccm_hw = {16, 16};
  cfg.edgeconv = {{{3, 8, 4}, {8, 8, 4}}};
  cfg.heads = 2;
  cfg.decoder_depth = 1;
  cfg.group_size = 4;
  return cfg;
}

std::string describe(const ModelConfig& cfg) {
  std::ostringstream os;
  os << "c=" << cfg.c << " n_in=" << cfg.n_in << " n_coarse=" << cfg.n_coarse
     << " merge_target=" << cfg.merge_target << " ratios=" << cfg.up_ratios[0] << "x"
     << cfg.up_ratios[1] << " ccm=" << cfg.ccm_hw[0] << "x" << cfg.ccm_hw[1]
     << " heads=" << cfg.heads << " depth=" << cfg.decoder_depth;
  return os.str();
}

}  // namespace tripoint::net
