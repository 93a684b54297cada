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

#include "tripoint/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tripoint/error.hpp"
#include "tripoint/rng.hpp"

namespace tripoint::ad {

namespace {

using Log = Graph<double>::DecisionLog;

struct Evaluation {
  double value = 0.0;
  std::uint64_t signature = 0;  // gathered indices
  Log log;                      // ReLU masks and reduce picks
};

// Plain forward pass that records its own choices.
Evaluation evaluate(const ScalarFn& fn) {
  Evaluation e;
  Graph<double> g;
  g.set_track_decisions(true);
  g.record_decisions(&e.log);
  e.value = fn(g).item();
  e.signature = g.decision_signature();
  return e;
}

// Forward pass that reuses the choices of `log`.
Evaluation replay(const ScalarFn& fn, const Log& log) {
  Evaluation e;
  Graph<double> g;
  g.set_track_decisions(true);
  g.replay_decisions(&log);
  e.value = fn(g).item();
  e.signature = g.decision_signature();
  return e;
}

}  // namespace

GradCheckResult check_gradients(std::string name, const std::vector<Parameter<double>*>& params,
                                const ScalarFn& fn, const GradCheckOptions& options) {
  GradCheckResult result;
  result.name = std::move(name);
  if (params.empty()) throw Error(ErrorCode::kInvalidConfig, "gradient check without parameters");
  // Gradients of parameters outside the probed set may accumulate; only the
  // probed ones are compared.
  for (auto* p : params) p->grad.assign(p->value.size(), 0.0);
  Evaluation base;
  {
    Graph<double> g;
    g.set_track_decisions(true);
    g.record_decisions(&base.log);
    const auto loss = fn(g);
    base.value = loss.item();
    base.signature = g.decision_signature();
    g.backward(loss);
  }

  Rng rng(options.seed, result.name);
  std::size_t attempts = 0;
  std::size_t cursor = 0;
  while (result.probes < options.probes && attempts < options.max_attempts) {
    ++attempts;
    auto* p = params[cursor % params.size()];
    if (p->value.empty()) {
      ++cursor;
      continue;
    }
    const std::size_t i = rng.index(p->value.size());
    const double original = p->value[i];
    auto at = [&](double v, bool frozen) {
      p->value[i] = v;
      auto e = frozen ? replay(fn, base.log) : evaluate(fn);
      p->value[i] = original;
      return e;
    };
    auto plus = at(original + options.step, false);
    auto minus = at(original - options.step, false);
    if (plus.signature != base.signature || minus.signature != base.signature ||
        plus.log != base.log || minus.log != base.log) {
      // The perturbation crosses a kink; difference the active smooth piece.
      plus = at(original + options.step, true);
      minus = at(original - options.step, true);
      ++result.replayed;
      if (plus.signature != base.signature || minus.signature != base.signature) {
        ++result.rejected;
        continue;  // same parameter, new coordinate
      }
    }
    ++cursor;
    const double numeric = (plus.value - minus.value) / (2.0 * options.step);
    const double analytic = p->grad[i];
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), options.denominator_floor});
    const double rel = std::abs(analytic - numeric) / denom;
    if (!(rel <= result.max_rel_error)) {
      result.max_rel_error = std::isnan(rel) ? INFINITY : rel;
      result.worst = p->name + "[" + std::to_string(i) + "]";
    }
    ++result.probes;
  }
  result.passed = result.probes >= options.probes && result.max_rel_error < options.tolerance;
  return result;
}

}  // namespace tripoint::ad
