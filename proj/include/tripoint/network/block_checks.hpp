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

#include <vector>

#include "tripoint/autodiff/gradcheck.hpp"
#include "tripoint/network/config.hpp"

namespace tripoint::net {

// Finite-difference checks of each network block in isolation (alignment,
// coordinate decoder, multi-scale extractor, upsampler) and of the full
// completion loss, in float64 at `config` (ModelConfig::tiny() by default).
std::vector<ad::GradCheckResult> check_blocks(const ModelConfig& config,
                                              const ad::GradCheckOptions& options = {});

// Every op check followed by every block check.
std::vector<ad::GradCheckResult> gradient_suite(const ad::GradCheckOptions& options = {});

}  // namespace tripoint::net
