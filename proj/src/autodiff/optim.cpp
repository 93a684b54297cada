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

#include "tripoint/autodiff/optim.hpp"

#include <cmath>

#include "tripoint/error.hpp"

namespace tripoint::ad {

template <typename T>
void Adam<T>::step(const std::vector<Parameter<T>*>& params) {
  for (const auto* p : params) {
    if (p->grad.size() != p->value.size()) {
      throw Error(ErrorCode::kMissingGrad, p->name + " has no gradient");
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (auto* p : params) {
    auto& st = state_[p->name];
    if (st.m.size() != p->value.size()) {
      st.m.assign(p->value.size(), 0.0);
      st.v.assign(p->value.size(), 0.0);
    }
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = static_cast<double>(p->grad[i]);
      st.m[i] = options_.beta1 * st.m[i] + (1.0 - options_.beta1) * g;
      st.v[i] = options_.beta2 * st.v[i] + (1.0 - options_.beta2) * g * g;
      const double mhat = st.m[i] / bc1;
      const double vhat = st.v[i] / bc2;
      p->value[i] -= static_cast<T>(options_.lr * mhat / (std::sqrt(vhat) + options_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace tripoint::ad
