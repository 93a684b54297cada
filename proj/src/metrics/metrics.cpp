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

#include "tripoint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tripoint/error.hpp"
#include "tripoint/simd.hpp"

namespace tripoint::metrics {

namespace {

void require_nonempty(const PointCloud& cloud, const char* what) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, what);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double mean_sqrt(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::sqrt(x);
  return s / static_cast<double>(v.size());
}

}  // namespace

NearestField nearest_field(const PointCloud& from, const PointCloud& to) {
  require_nonempty(from, "nearest field source");
  require_nonempty(to, "nearest field target");
  const CloudSoA soa(to);
  const auto& k = simd::active();
  NearestField field;
  field.sqdist.resize(from.size());
  field.index.resize(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto hit =
        k.nearest_f64(from[i].x, from[i].y, from[i].z, soa.x.data(), soa.y.data(), soa.z.data(),
                      to.size());
    field.sqdist[i] = hit.sqdist;
    field.index[i] = hit.index;
  }
  return field;
}

double chamfer(const PointCloud& p, const PointCloud& q, ChamferOrder order) {
  require_nonempty(p, "chamfer: first cloud");
  require_nonempty(q, "chamfer: second cloud");
  const auto pq = nearest_field(p, q);
  const auto qp = nearest_field(q, p);
  if (order == ChamferOrder::kL2) {
    return mean(pq.sqdist) + mean(qp.sqdist);
  }
  return 0.5 * (mean_sqrt(pq.sqdist) + mean_sqrt(qp.sqdist));
}

double arcosh1p(double x) {
  const double y = 1.0 + x;
  return std::log(y + std::sqrt(y * y - 1.0));
}

double arc_cd(const PointCloud& p, const PointCloud& q) {
  return arcosh1p(chamfer(p, q, ChamferOrder::kL2));
}

LossValue total_loss(const PointCloud& p0, const PointCloud& p1, const PointCloud& p2,
                     const PointCloud& gt) {
  LossValue loss;
  loss.terms = {arc_cd(p0, gt), arc_cd(p1, gt), arc_cd(p2, gt)};
  for (double t : loss.terms) loss.total += t;
  return loss;
}

double fscore(const PointCloud& p, const PointCloud& gt, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::kBadThreshold, "threshold must be positive");
  require_nonempty(p, "fscore: prediction");
  require_nonempty(gt, "fscore: ground truth");
  auto fraction_within = [threshold](const NearestField& field) {
    std::size_t hits = 0;
    for (double d2 : field.sqdist) hits += std::sqrt(d2) < threshold ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(field.sqdist.size());
  };
  const double precision = fraction_within(nearest_field(p, gt));
  const double recall = fraction_within(nearest_field(gt, p));
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double dcd(const PointCloud& p, const PointCloud& gt, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kBadThreshold, "alpha must be positive");
  require_nonempty(p, "dcd: prediction");
  require_nonempty(gt, "dcd: ground truth");
  auto direction = [alpha](const NearestField& field, std::size_t target_size) {
    std::vector<std::size_t> hits(target_size, 0);
    for (auto j : field.index) ++hits[j];
    double sum = 0.0;
    for (std::size_t i = 0; i < field.index.size(); ++i) {
      const double weight = 1.0 / static_cast<double>(hits[field.index[i]]);
      sum += 1.0 - std::exp(-alpha * field.sqdist[i]) * weight;
    }
    return sum / static_cast<double>(field.index.size());
  };
  const double forward = direction(nearest_field(p, gt), gt.size());
  const double backward = direction(nearest_field(gt, p), p.size());
  return 0.5 * (forward + backward);
}

double fidelity(const PointCloud& input_partial, const PointCloud& completed) {
  require_nonempty(input_partial, "fidelity: partial input");
  require_nonempty(completed, "fidelity: completion");
  return mean(nearest_field(input_partial, completed).sqdist);
}

double mmd(const PointCloud& completed, std::span<const PointCloud> references) {
  if (references.empty()) throw Error(ErrorCode::kEmptyReferenceSet, "mmd needs references");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ref : references) {
    best = std::min(best, chamfer(completed, ref, ChamferOrder::kL2));
  }
  return best;
}

MetricReport evaluate_pair(const PointCloud& pred, const PointCloud& gt,
                           const PointCloud* partial) {
  MetricReport report;
  report.cd_l1 = chamfer(pred, gt, ChamferOrder::kL1);
  report.cd_l2 = chamfer(pred, gt, ChamferOrder::kL2);
  report.arc_cd = arcosh1p(*report.cd_l2);
  report.dcd = dcd(pred, gt, report.dcd_alpha);
  report.fscore = fscore(pred, gt, report.fscore_threshold);
  if (partial != nullptr) report.fidelity = fidelity(*partial, pred);
  return report;
}

}  // namespace tripoint::metrics
