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

// Acceptance harness: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset (default: all).

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "tripoint/autodiff/checkpoint.hpp"
#include "tripoint/autodiff/ops.hpp"
#include "tripoint/ccm.hpp"
#include "tripoint/metrics.hpp"
#include "tripoint/network/block_checks.hpp"
#include "tripoint/network/model.hpp"
#include "tripoint/pipeline/evaluate.hpp"
#include "tripoint/pipeline/train.hpp"
#include "tripoint/point_io.hpp"

using namespace tripoint;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr std::size_t kOraclePairs = 200;
constexpr std::size_t kOracleMaxPoints = 256;
constexpr double kOracleRelTol = 1e-12;
constexpr double kOracleBudgetSec = 30.0;
constexpr std::size_t kDerivativeGrid = 100;
constexpr std::size_t kMonotonePairs = 100;
constexpr double kGradTolerance = 1e-3;
constexpr std::size_t kGradMinProbes = 20;
constexpr double kGradBudgetSec = 300.0;
constexpr std::size_t kCcmClouds = 50;
constexpr std::size_t kOverfitIterations = 500;
constexpr double kOverfitLossRatio = 0.1;
constexpr double kOverfitCdRatio = 0.3;
constexpr double kOverfitBudgetSec = 1200.0;
constexpr std::size_t kAblationSeeds = 5;
constexpr std::size_t kDeterminismIterations = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// 1. Metrics against brute-force double loops.
Outcome metric_oracles() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024, "acceptance.metrics");
  std::size_t failures = 0;
  double worst = 0.0;
  auto check = [&](double got, double want) {
    const double scale = std::max(std::abs(got), std::abs(want));
    const double rel = scale > 0.0 ? std::abs(got - want) / scale : 0.0;
    worst = std::max(worst, rel);
    if (rel > kOracleRelTol) ++failures;
  };
  for (std::size_t t = 0; t < kOraclePairs; ++t) {
    const std::size_t n = 1 + rng.index(kOracleMaxPoints);
    const std::size_t m = 1 + rng.index(kOracleMaxPoints);
    const auto p = testing::random_cloud(rng, n);
    const auto q = testing::random_cloud(rng, m);
    const double thr = rng.uniform(0.01, 0.2);
    check(metrics::chamfer(p, q, metrics::ChamferOrder::kL2), oracle::chamfer_l2(p, q));
    check(metrics::chamfer(q, p, metrics::ChamferOrder::kL2), oracle::chamfer_l2(q, p));
    check(metrics::chamfer(p, q, metrics::ChamferOrder::kL1), oracle::chamfer_l1(p, q));
    check(metrics::chamfer(q, p, metrics::ChamferOrder::kL1), oracle::chamfer_l1(q, p));
    check(metrics::dcd(p, q), oracle::dcd(p, q, metrics::kDefaultDcdAlpha));
    check(metrics::fscore(p, q, thr), oracle::fscore(p, q, thr));
    check(metrics::fscore(p, q), oracle::fscore(p, q, metrics::kDefaultFscoreThreshold));
    check(metrics::fidelity(p, q), oracle::fidelity(p, q));
    std::vector<PointCloud> refs{q, testing::random_cloud(rng, 1 + rng.index(64)),
                                 testing::random_cloud(rng, 1 + rng.index(64))};
    check(metrics::mmd(p, refs), oracle::mmd(p, refs));
  }
  const double sec = seconds_since(start);
  return {failures == 0 && sec < kOracleBudgetSec,
          format("%zu pairs, worst rel %.2e (tol %.0e), %zu failures, %.2fs (budget %.0fs)",
                 kOraclePairs, worst, kOracleRelTol, failures, sec, kOracleBudgetSec)};
}

// 2. arcosh loss analytics, derivatives taken from the autodiff engine.
double backward_derivative(double x, bool arcosh) {
  ad::ParameterStore<double> store;
  auto& p = store.add("x", {1}, {x});
  ad::Graph<double> g;
  const auto t = g.param(p);
  g.backward(ad::sum(arcosh ? ad::arcosh1p(t) : ad::sqrt(t)));
  return p.grad[0];
}

Outcome loss_analytics() {
  Rng rng(7, "acceptance.loss");
  bool identity = true;
  for (int i = 0; i < 10; ++i) {
    const auto p = testing::random_cloud(rng, 10 + rng.index(100));
    identity = identity && metrics::arc_cd(p, p) == 0.0;
  }
  std::size_t dominated = 0;
  for (std::size_t k = 1; k <= kDerivativeGrid; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(kDerivativeGrid);
    dominated += backward_derivative(x, true) >= backward_derivative(x, false) ? 1 : 0;
  }
  std::size_t monotone = 0;
  for (std::size_t t = 0; t < kMonotonePairs; ++t) {
    const auto gt = testing::random_cloud(rng, 64);
    const auto a = testing::random_cloud(rng, 64, -rng.uniform(0, 1), 1.0 + rng.uniform(0, 1));
    const auto b = testing::random_cloud(rng, 64, -rng.uniform(0, 1), 1.0 + rng.uniform(0, 1));
    const double ca = metrics::chamfer(a, gt, metrics::ChamferOrder::kL2);
    const double cb = metrics::chamfer(b, gt, metrics::ChamferOrder::kL2);
    const double aa = metrics::arc_cd(a, gt), ab = metrics::arc_cd(b, gt);
    const bool ok = (ca < cb && aa < ab) || (cb < ca && ab < aa) || (ca == cb && aa == ab);
    monotone += ok ? 1 : 0;
  }
  return {identity && dominated == kDerivativeGrid && monotone == kMonotonePairs,
          format("arc_cd(P,P)=0: %s; derivative dominance %zu/%zu; monotone %zu/%zu",
                 identity ? "yes" : "no", dominated, kDerivativeGrid, monotone, kMonotonePairs)};
}

// 3. Finite-difference gradient suite.
Outcome gradient_suite() {
  const auto start = std::chrono::steady_clock::now();
  ad::GradCheckOptions options;
  options.step = 1e-3;
  options.tolerance = kGradTolerance;
  const auto results = net::gradient_suite(options);
  const double sec = seconds_since(start);
  std::size_t bad = 0;
  double worst = 0.0;
  std::string worst_name;
  std::set<std::string> names;
  for (const auto& r : results) {
    names.insert(r.name);
    if (!(r.passed && r.probes >= kGradMinProbes && r.max_rel_error < kGradTolerance)) {
      ++bad;
      std::printf("  gradcheck failure: %s err %.3e probes %zu at %s\n", r.name.c_str(),
                  r.max_rel_error, r.probes, r.worst.c_str());
    }
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_name = r.name;
    }
  }
  const char* blocks[] = {"block.align_features", "block.decode_coords", "block.extract_multiscale",
                          "block.upsample", "block.complete"};
  bool all_blocks = true;
  for (const char* b : blocks) all_blocks = all_blocks && names.count(b) == 1;
  return {bad == 0 && all_blocks && sec < kGradBudgetSec,
          format("%zu checks (all 5 blocks: %s), %zu failing, worst %.2e in %s, %.1fs", results.size(),
                 all_blocks ? "yes" : "no", bad, worst, worst_name.c_str(), sec)};
}

// 4. Multi-view consistency of the coordinate maps.
Outcome ccm_consistency() {
  Rng rng(11, "acceptance.ccm");
  std::size_t multi_view_points = 0, color_mismatch = 0, non_member = 0, covered = 0;
  for (std::size_t t = 0; t < kCcmClouds; ++t) {
    const auto raw = testing::random_cloud(rng, 64 + rng.index(900), -2.0, 3.0);
    const auto cloud = normalize_canonical(raw).cloud;
    const std::size_t res = 8 << rng.index(4);
    const auto maps = ccm::render_triplane(cloud, res, res);
    std::set<std::array<float, 3>> members;
    for (const auto& p : cloud) {
      members.insert({static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z)});
    }
    std::vector<std::vector<std::array<float, 3>>> owned(cloud.size());
    for (std::size_t v = 0; v < 3; ++v) {
      const auto owners = ccm::render_owners(cloud, ccm::canonical_views()[v], res, res);
      for (std::size_t px = 0; px < owners.size(); ++px) {
        if (!maps[v].mask[px]) continue;
        ++covered;
        const std::array<float, 3> c{maps[v].pixels[px * 3], maps[v].pixels[px * 3 + 1],
                                     maps[v].pixels[px * 3 + 2]};
        if (members.count(c) == 0) ++non_member;
        if (owners[px] < cloud.size()) owned[owners[px]].push_back(c);
      }
    }
    for (const auto& colors : owned) {
      if (colors.size() < 2) continue;
      ++multi_view_points;
      for (const auto& c : colors) {
        if (std::memcmp(c.data(), colors[0].data(), sizeof c) != 0) ++color_mismatch;
      }
    }
  }
  return {multi_view_points > 0 && color_mismatch == 0 && non_member == 0,
          format("%zu clouds, %zu points seen in >=2 views, %zu color mismatches, "
                 "%zu/%zu covered pixels outside the cloud",
                 kCcmClouds, multi_view_points, color_mismatch, non_member, covered)};
}

// 5. Symbol shapes at three widths, cardinality and residual identity.
std::map<std::string, ad::Shape> expected_shapes(const net::ModelConfig& cfg) {
  const std::size_t c = cfg.c, d = cfg.width(), np = cfg.n_in;
  std::map<std::string, ad::Shape> e = {{"F_p", {1, 2 * c}}, {"F_c", {3, c}},
                                        {"F_a'", {4, d}},    {"F_a", {1, 2 * c}},
                                        {"F", {1, 4 * c}},   {"P0", {cfg.n_coarse, 3}},
                                        {"merged", {cfg.merge_target, 3}}};
  std::size_t n = cfg.merge_target;
  for (std::size_t s = 1; s <= 2; ++s) {
    const std::string t = "up" + std::to_string(s) + ".";
    const std::size_t r = cfg.up_ratios[s - 1];
    e[t + "F_e1"] = {np, cfg.edgeconv[0].out};
    e[t + "F_e2"] = {np, cfg.edgeconv[1].out};
    e[t + "F_e1'"] = {np, net::kInceptionWidth};
    e[t + "F_e2'"] = {np, net::kInceptionWidth};
    e[t + "F_p'"] = {np, d};
    e[t + "F_ai'"] = {n, d};
    e[t + "F_ai"] = {n, d};
    e[t + "F_pi"] = {n, d};
    e[t + "Delta"] = {n * r, 3};
    e[t + "P_next"] = {n * r, 3};
    n *= r;
  }
  return e;
}

Outcome shape_contracts() {
  const net::ModelConfig configs[] = {net::ModelConfig::tiny(), net::ModelConfig::toy(),
                                      net::ModelConfig::desk()};
  std::size_t shape_errors = 0, card_errors = 0, residual_errors = 0, symbols = 0;
  std::string widths;
  for (const auto& cfg : configs) {
    widths += (widths.empty() ? "" : ",") + std::to_string(cfg.c);
    pipeline::SynthSpec spec;
    spec.partial_points = cfg.n_in;
    spec.gt_points = 4 * cfg.n_in;
    const auto sample = pipeline::synth_generate(spec, 5);

    net::GeoFormer<float> model(cfg, 3);
    {
      ad::Graph<float> g;
      net::ShapeTrace trace;
      const auto out = model.forward(g, sample.partial, &trace);
      const auto want = expected_shapes(cfg);
      symbols += want.size();
      for (const auto& [name, shape] : want) {
        const auto it = trace.find(name);
        if (it == trace.end() || it->second != shape) {
          ++shape_errors;
          std::printf("  shape mismatch at C=%zu: %s\n", cfg.c, name.c_str());
        }
      }
      if (out.p1.dim(0) != cfg.up_ratios[0] * out.merged.dim(0)) ++card_errors;
      if (out.p2.dim(0) != cfg.up_ratios[1] * out.p1.dim(0)) ++card_errors;
    }
    for (const char* head : {"upsampler1.head.", "upsampler2.head."}) {
      for (auto* p : model.parameters_with_prefix(head)) {
        std::fill(p->value.begin(), p->value.end(), 0.0f);
      }
    }
    ad::Graph<float> g;
    const auto out = model.forward(g, sample.partial);
    const auto replicated = [&](const ad::Tensor<float>& prev, const ad::Tensor<float>& next,
                                std::size_t r) {
      for (std::size_t i = 0; i < next.dim(0); ++i) {
        if (std::memcmp(next.value().data() + i * 3, prev.value().data() + (i / r) * 3,
                        3 * sizeof(float)) != 0) {
          return false;
        }
      }
      return true;
    };
    if (!replicated(out.merged, out.p1, cfg.up_ratios[0])) ++residual_errors;
    if (!replicated(out.p1, out.p2, cfg.up_ratios[1])) ++residual_errors;
  }
  return {shape_errors == 0 && card_errors == 0 && residual_errors == 0,
          format("C in {%s}: %zu symbol shapes checked, %zu mismatches; cardinality errors %zu; "
                 "residual identity errors %zu",
                 widths.c_str(), symbols, shape_errors, card_errors, residual_errors)};
}

// 6 and 7. Overfit benchmark.
struct OverfitRun {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double cd_p2 = 0.0;
  double cd_partial = 0.0;
  double seconds = 0.0;
};

enum class Variant { kFull, kNoCcm, kNoInception };

OverfitRun overfit(std::uint64_t seed, Variant variant) {
  pipeline::RunConfig cfg;
  cfg.model = net::ModelConfig::toy();
  cfg.model.use_ccm = variant != Variant::kNoCcm;
  cfg.model.use_inception = variant != Variant::kNoInception;
  cfg.synth = pipeline::SynthSpec{};  // sphere-box union, 2048 / 512 points
  cfg.seed = seed;
  cfg.iterations = kOverfitIterations;
  cfg.fixed_shape = true;
  const auto start = std::chrono::steady_clock::now();
  pipeline::Trainer trainer(cfg);
  trainer.run();
  OverfitRun r;
  r.initial_loss = trainer.log().rows.front().loss;
  r.final_loss = trainer.log().rows.back().loss;
  const auto& pair = trainer.sample(0, 0);
  r.cd_p2 = metrics::chamfer(trainer.model().complete(pair.partial).p2, pair.gt,
                             metrics::ChamferOrder::kL2);
  r.cd_partial = metrics::chamfer(pair.partial, pair.gt, metrics::ChamferOrder::kL2);
  r.seconds = seconds_since(start);
  return r;
}

std::map<std::uint64_t, OverfitRun> g_full_runs;

const OverfitRun& full_run(std::uint64_t seed) {
  auto it = g_full_runs.find(seed);
  if (it == g_full_runs.end()) it = g_full_runs.emplace(seed, overfit(seed, Variant::kFull)).first;
  return it->second;
}

Outcome overfit_benchmark() {
  const auto& r = full_run(1);
  const double loss_ratio = r.final_loss / r.initial_loss;
  const double cd_ratio = r.cd_p2 / r.cd_partial;
  return {loss_ratio <= kOverfitLossRatio && cd_ratio <= kOverfitCdRatio &&
              r.seconds < kOverfitBudgetSec,
          format("loss %.4f -> %.4f (ratio %.3f, need <= %.2f); CD-l2 p2 %.3e vs partial %.3e "
                 "(ratio %.3f, need <= %.2f); %.0fs (budget %.0fs)",
                 r.initial_loss, r.final_loss, loss_ratio, kOverfitLossRatio, r.cd_p2,
                 r.cd_partial, cd_ratio, kOverfitCdRatio, r.seconds, kOverfitBudgetSec)};
}

Outcome ablation_ordering() {
  double full = 0.0, no_ccm = 0.0, no_inc = 0.0;
  for (std::uint64_t seed = 1; seed <= kAblationSeeds; ++seed) {
    const double f = full_run(seed).cd_p2;
    const double c = overfit(seed, Variant::kNoCcm).cd_p2;
    const double i = overfit(seed, Variant::kNoInception).cd_p2;
    std::printf("  seed %llu: full %.4e  no-ccm %.4e  no-inception %.4e\n",
                static_cast<unsigned long long>(seed), f, c, i);
    std::fflush(stdout);
    full += f;
    no_ccm += c;
    no_inc += i;
  }
  const double n = static_cast<double>(kAblationSeeds);
  full /= n;
  no_ccm /= n;
  no_inc /= n;
  return {full <= no_ccm && full <= no_inc,
          format("mean CD-l2 over %zu seeds: full %.4e, no-ccm %.4e, no-inception %.4e",
                 kAblationSeeds, full, no_ccm, no_inc)};
}

// 8. Determinism and persistence.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Train log without the wall-clock column.
std::string log_without_ms(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

Outcome determinism() {
  const auto root = testing::scratch_dir("acceptance_determinism");
  pipeline::RunConfig cfg;
  cfg.model = net::ModelConfig::toy();
  cfg.iterations = kDeterminismIterations;
  cfg.seed = 9;
  cfg.output_dir = root / "a";
  pipeline::train(cfg);
  cfg.output_dir = root / "b";
  pipeline::train(cfg);
  const bool logs = log_without_ms(root / "a" / "train_log.csv") ==
                        log_without_ms(root / "b" / "train_log.csv") &&
                    !slurp(root / "a" / "train_log.csv").empty();
  const bool weights = slurp(root / "a" / "model.gfck") == slurp(root / "b" / "model.gfck");

  net::GeoFormer<float> model(cfg.model, 77);
  ad::load_parameters(root / "a" / "model.gfck", model.parameters());
  ad::save_parameters(root / "resaved.gfck", model.parameters());
  const bool roundtrip = slurp(root / "a" / "model.gfck") == slurp(root / "resaved.gfck");

  Rng rng(5, "acceptance.eval");
  fs::create_directories(root / "clouds");
  for (int i = 0; i < 4; ++i) {
    io::write_xyz(root / "clouds" / ("c" + std::to_string(i) + ".xyz"),
                  testing::random_cloud(rng, 100 + 20 * i));
  }
  const auto rows = pipeline::evaluate_dirs(root / "clouds", root / "clouds");
  bool eval_ok = rows.size() == 4;
  for (const auto& r : rows) {
    eval_ok = eval_ok && *r.report.cd_l1 == 0.0 && *r.report.cd_l2 == 0.0 &&
              *r.report.fscore == 1.0;
  }
  return {logs && weights && roundtrip && eval_ok,
          format("same-seed logs identical: %s; final weights identical: %s; "
                 "save/load/save byte-identical: %s; eval on identical dirs zero CD, F=1: %s",
                 logs ? "yes" : "no", weights ? "yes" : "no", roundtrip ? "yes" : "no",
                 eval_ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracle suite", metric_oracles},
      {2, "loss function analytics", loss_analytics},
      {3, "gradient suite", gradient_suite},
      {4, "ccm consistency", ccm_consistency},
      {5, "shape contracts", shape_contracts},
      {6, "overfit benchmark", overfit_benchmark},
      {7, "ablation direction", ablation_ordering},
      {8, "determinism and persistence", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && wanted.count(c.id) == 0) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
