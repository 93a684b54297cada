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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tripoint/autodiff/tensor.hpp"

namespace tripoint::ad {

struct GradCheckOptions {
  double step = 1e-3;        // central difference half-width
  double tolerance = 1e-3;   // max relative error
  // Relative error is |a - n| / max(|a|, |n|, floor); below the floor the
  // comparison is effectively absolute.
  double denominator_floor = 1e-4;
  std::size_t probes = 24;
  std::size_t max_attempts = 2000;
  std::uint64_t seed = 17;
};

struct GradCheckResult {
  std::string name;
  std::size_t probes = 0;    // accepted probes
  std::size_t rejected = 0;  // probes that changed a gathered index set
  std::size_t replayed = 0;  // probes differenced with frozen logged choices
  double max_rel_error = 0.0;
  std::string worst;         // parameter[index] of the worst probe
  bool passed = false;
};

// Scalar objective rebuilt in a fresh graph for each evaluation.
using ScalarFn = std::function<Tensor<double>(Graph<double>&)>;

// Compares backward() against central finite differences on randomly probed
// parameter coordinates. Probes cycle over parameters so every tensor is hit
// when probes >= number of parameters. When a perturbation flips a logged
// choice (ReLU mask, max/min pick, sampled subset), the probe is re-evaluated
// with the unperturbed pass's choices replayed, i.e. on the smooth piece the
// analytic gradient belongs to. A probe whose replay still changes a gathered
// index set is discarded and redrawn.
GradCheckResult check_gradients(std::string name, const std::vector<Parameter<double>*>& params,
                                const ScalarFn& fn, const GradCheckOptions& options = {});

// One check per differentiable op on small random operands, each contracted
// with a fixed random weight tensor to give a scalar.
std::vector<GradCheckResult> check_all_ops(const GradCheckOptions& options = {});

}  // namespace tripoint::ad
