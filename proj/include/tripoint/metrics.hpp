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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tripoint/geometry.hpp"

namespace tripoint::metrics {

enum class ChamferOrder { kL1, kL2 };

inline constexpr double kDefaultFscoreThreshold = 0.01;
inline constexpr double kDefaultDcdAlpha = 1000.0;

// Squared distance from every point of `from` to its nearest point in `to`,
// with the nearest index (lowest index on ties).
struct NearestField {
  std::vector<double> sqdist;
  std::vector<std::size_t> index;
};
NearestField nearest_field(const PointCloud& from, const PointCloud& to);

// L2: mean squared nearest distance p->q plus q->p.
// L1: half the sum of the two mean Euclidean nearest distances.
double chamfer(const PointCloud& p, const PointCloud& q, ChamferOrder order);

// arcosh(1 + x) = ln((1 + x) + sqrt((1 + x)^2 - 1)), x >= 0.
double arcosh1p(double x);

double arc_cd(const PointCloud& p, const PointCloud& q);

struct LossValue {
  double total = 0.0;
  std::vector<double> terms;  // coarse, stage 1, stage 2
};

LossValue total_loss(const PointCloud& p0, const PointCloud& p1, const PointCloud& p2,
                     const PointCloud& gt);

// Harmonic mean of precision (fraction of p within `threshold` of gt) and
// recall (fraction of gt within `threshold` of p); 0 when both are 0.
double fscore(const PointCloud& p, const PointCloud& gt,
              double threshold = kDefaultFscoreThreshold);

// Density-aware chamfer distance, bounded in [0, 1]:
// 1/2 * sum over directions of mean(1 - exp(-alpha * d^2) / n), where n counts
// how many points of the same side share that nearest neighbor.
double dcd(const PointCloud& p, const PointCloud& gt, double alpha = kDefaultDcdAlpha);

// Mean squared distance from each partial-input point to the completion.
double fidelity(const PointCloud& input_partial, const PointCloud& completed);

// Minimum L2 chamfer distance to any reference shape.
double mmd(const PointCloud& completed, std::span<const PointCloud> references);

struct MetricReport {
  std::optional<double> cd_l1;
  std::optional<double> cd_l2;
  std::optional<double> arc_cd;
  std::optional<double> dcd;
  std::optional<double> fscore;
  std::optional<double> fidelity;
  std::optional<double> mmd;

  // Conventions the values were computed under.
  double fscore_threshold = kDefaultFscoreThreshold;
  double dcd_alpha = kDefaultDcdAlpha;
  bool fidelity_squared = true;
};

// All pairwise metrics; fidelity only when a partial input is supplied.
MetricReport evaluate_pair(const PointCloud& pred, const PointCloud& gt,
                           const PointCloud* partial = nullptr);

}  // namespace tripoint::metrics
