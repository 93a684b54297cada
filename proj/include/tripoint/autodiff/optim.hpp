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

#include <string>
#include <unordered_map>
#include <vector>

#include "tripoint/autodiff/tensor.hpp"

namespace tripoint::ad {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer. Moment state is keyed by parameter name, so a
// reloaded model continues with fresh state.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // In-place update of every parameter. Throws MissingGrad when a parameter
  // has no gradient buffer.
  void step(const std::vector<Parameter<T>*>& params);

  AdamOptions& options() { return options_; }
  long steps() const { return t_; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  AdamOptions options_;
  long t_ = 0;
  std::unordered_map<std::string, Moments> state_;
};

}  // namespace tripoint::ad
