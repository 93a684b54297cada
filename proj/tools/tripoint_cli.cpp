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

// Command-line front end. Exit status: 0 success, 1 runtime failure,
// 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tripoint/autodiff/checkpoint.hpp"
#include "tripoint/ccm.hpp"
#include "tripoint/error.hpp"
#include "tripoint/network/block_checks.hpp"
#include "tripoint/network/model.hpp"
#include "tripoint/pipeline/evaluate.hpp"
#include "tripoint/pipeline/run_config.hpp"
#include "tripoint/pipeline/synth.hpp"
#include "tripoint/pipeline/train.hpp"
#include "tripoint/point_io.hpp"

namespace fs = std::filesystem;
using namespace tripoint;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

pipeline::RunConfig build_config(const std::string& file, const std::vector<std::string>& sets) {
  pipeline::RunConfig cfg = file.empty() ? pipeline::RunConfig{} : pipeline::load_run_config(file);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    auto trim = [](std::string& v) {
      v.erase(0, v.find_first_not_of(' '));
      v.erase(v.find_last_not_of(' ') + 1);
    };
    trim(key);
    trim(value);
    pipeline::apply_setting(cfg, key, value);
  }
  return cfg;
}

int run_synth(const fs::path& out, std::size_t count, std::uint64_t seed,
              const pipeline::SynthSpec& spec, const std::string& ext) {
  fs::create_directories(out / "partial");
  fs::create_directories(out / "gt");
  for (std::size_t i = 0; i < count; ++i) {
    const auto sample = pipeline::synth_generate(spec, Rng::derive_seed(seed, "shape." + std::to_string(i)));
    char name[32];
    std::snprintf(name, sizeof name, "shape_%04zu.%s", i, ext.c_str());
    io::write_cloud(out / "partial" / name, sample.partial);
    io::write_cloud(out / "gt" / name, sample.gt);
  }
  std::cout << "wrote " << count << " pairs to " << out.string() << "\n";
  return 0;
}

int run_render(const fs::path& in, std::size_t res, const fs::path& out) {
  const auto cloud = io::read_cloud(in);
  const auto canonical = normalize_canonical(cloud);
  const auto maps = ccm::render_triplane(canonical.cloud, res, res);
  fs::create_directories(out);
  static const char* kNames[] = {"front", "right", "top"};
  const std::string stem = in.stem().string();
  for (std::size_t v = 0; v < 3; ++v) {
    const std::string base = stem + "_" + kNames[v];
    ccm::write_ccm(out / (base + ".ccm"), maps[v]);
    ccm::write_ppm(out / (base + ".ppm"), maps[v]);
    std::cout << base << ": " << maps[v].covered_count() << " covered pixels\n";
  }
  return 0;
}

int run_train(const pipeline::RunConfig& cfg) {
  const auto log = pipeline::train(cfg);
  const auto& first = log.rows.front();
  const auto& last = log.rows.back();
  std::printf("iterations %zu  loss %.6g -> %.6g  output %s\n", log.rows.size(), first.loss,
              last.loss, cfg.output_dir.string().c_str());
  return 0;
}

int run_complete(const pipeline::RunConfig& cfg, const fs::path& checkpoint, const fs::path& in,
                 const fs::path& out) {
  net::GeoFormer<float> model(cfg.model, 0);
  ad::load_parameters(checkpoint, model.parameters());
  const auto result = model.complete(io::read_cloud(in));
  fs::create_directories(out);
  const std::string stem = in.stem().string();
  io::write_cloud(out / (stem + "_p0.xyz"), result.p0);
  io::write_cloud(out / (stem + "_p1.xyz"), result.p1);
  io::write_cloud(out / (stem + "_p2.xyz"), result.p2);
  std::printf("p0 %zu  p1 %zu  p2 %zu points\n", result.p0.size(), result.p1.size(),
              result.p2.size());
  return 0;
}

int run_eval(const fs::path& pred, const fs::path& gt, const fs::path& partial,
             const std::string& out, std::size_t threads) {
  const auto rows = pipeline::evaluate_dirs(pred, gt, partial, threads);
  if (out.empty() || out == "-") {
    pipeline::write_eval_csv(std::cout, rows);
  } else {
    pipeline::write_eval_csv(fs::path(out), rows);
  }
  return 0;
}

int run_gradcheck(const ad::GradCheckOptions& options) {
  const auto results = net::gradient_suite(options);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s %-26s probes %2zu  replayed %2zu  max_rel %.3e%s%s\n",
                r.passed ? "ok" : "FAIL", r.name.c_str(), r.probes, r.replayed, r.max_rel_error,
                r.worst.empty() ? "" : "  at ", r.worst.c_str());
    ok = ok && r.passed;
  }
  std::printf("%zu checks, %s\n", results.size(), ok ? "all passed" : "FAILURES");
  return ok ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tripoint: point cloud completion toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate partial/ground-truth pairs");
  std::string synth_out;
  std::size_t synth_count = 8;
  std::uint64_t synth_seed = 1;
  std::string family = "union", ext = "xyz";
  pipeline::SynthSpec spec;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--count", synth_count, "Number of pairs")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--family", family, "sphere, box, cylinder, torus or union");
  synth->add_option("--gt-points", spec.gt_points, "Ground-truth points");
  synth->add_option("--partial-points", spec.partial_points, "Partial points");
  synth->add_option("--occlusion", spec.occlusion, "Kept fraction in (0,1)");
  synth->add_option("--jitter", spec.jitter, "Gaussian noise sigma on the partial cloud");
  synth->add_option("--format", ext, "xyz or pcb")->check(CLI::IsMember({"xyz", "pcb"}));

  // render-ccm
  auto* render = app.add_subcommand("render-ccm", "Render the three canonical coordinate maps");
  std::string render_in, render_out;
  std::size_t res = 64;
  render->add_option("--in", render_in, "Cloud file (.xyz or .pcb)")->required();
  render->add_option("--res", res, "Map resolution")->check(CLI::PositiveNumber);
  render->add_option("--out", render_out, "Output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  std::string config_file;
  std::vector<std::string> sets;
  std::uint64_t train_seed = 0;
  std::size_t iterations = 0;
  double lr = 0.0;
  std::string train_out;
  train->add_option("--config", config_file, "key = value config file");
  train->add_option("--set", sets, "Override one setting (key=value), repeatable");
  auto* seed_opt = train->add_option("--seed", train_seed, "Random seed");
  auto* iter_opt = train->add_option("--iterations", iterations, "Iterations");
  auto* lr_opt = train->add_option("--lr", lr, "Adam learning rate");
  auto* out_opt = train->add_option("--out", train_out, "Output directory");

  // complete
  auto* complete = app.add_subcommand("complete", "Complete a partial cloud with a checkpoint");
  std::string ckpt, complete_config, complete_in, complete_out;
  std::vector<std::string> complete_sets;
  complete->add_option("--checkpoint", ckpt, "GFCK checkpoint")->required();
  complete->add_option("--config", complete_config, "Config the checkpoint was trained with");
  complete->add_option("--set", complete_sets, "Override one setting (key=value)");
  complete->add_option("--in", complete_in, "Partial cloud")->required();
  complete->add_option("--out", complete_out, "Output directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  std::string pred_dir, gt_dir, partial_dir, eval_out;
  std::size_t threads = 0;
  eval->add_option("--pred", pred_dir, "Prediction directory")->required();
  eval->add_option("--gt", gt_dir, "Ground-truth directory")->required();
  eval->add_option("--partial", partial_dir, "Partial inputs, enables fidelity");
  eval->add_option("--out", eval_out, "CSV path (stdout when omitted)");
  eval->add_option("--threads", threads, "Workers (default TRIPOINT_THREADS or all cores)");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  ad::GradCheckOptions gc;
  gradcheck->add_option("--seed", gc.seed, "Probe seed");
  gradcheck->add_option("--probes", gc.probes, "Probes per check")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*synth) {
      spec.family = pipeline::parse_family(family);
      return run_synth(synth_out, synth_count, synth_seed, spec, ext);
    }
    if (*render) return run_render(render_in, res, render_out);
    if (*train) {
      auto cfg = build_config(config_file, sets);
      if (*seed_opt) cfg.seed = train_seed;
      if (*iter_opt) cfg.iterations = iterations;
      if (*lr_opt) cfg.lr = lr;
      if (*out_opt) cfg.output_dir = train_out;
      return run_train(cfg);
    }
    if (*complete) {
      return run_complete(build_config(complete_config, complete_sets), ckpt, complete_in,
                          complete_out);
    }
    if (*eval) return run_eval(pred_dir, gt_dir, partial_dir, eval_out, threads);
    if (*gradcheck) return run_gradcheck(gc);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
