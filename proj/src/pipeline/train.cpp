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

#include "tripoint/pipeline/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tripoint/autodiff/checkpoint.hpp"
#include "tripoint/error.hpp"
#include "tripoint/point_io.hpp"

namespace tripoint::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt("%.9g", *v) : ""; }

}  // namespace

void write_train_log(std::ostream& out, const TrainLog& log) {
  out << "iter,loss,term0,term1,term2,ms\n";
  for (const auto& r : log.rows) {
    out << r.iter << "," << fmt("%.9g", r.loss) << "," << fmt("%.9g", r.terms[0]) << ","
        << fmt("%.9g", r.terms[1]) << "," << fmt("%.9g", r.terms[2]) << ","
        << fmt("%.3f", r.ms) << "\n";
  }
}

void write_train_log(const fs::path& path, const TrainLog& log) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  write_train_log(out, log);
}

std::vector<Pair> load_dataset(const fs::path& dir) {
  const auto partial_dir = dir / "partial";
  const auto gt_dir = dir / "gt";
  if (!fs::is_directory(partial_dir) || !fs::is_directory(gt_dir)) {
    throw Error(ErrorCode::kUnreadableFile, dir.string() + " lacks partial/ and gt/");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(partial_dir)) {
    if (e.is_regular_file() && io::is_cloud_file(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::kMissingPair, "no clouds in " + partial_dir.string());
  std::vector<Pair> pairs;
  for (const auto& f : files) {
    const auto gt = gt_dir / f.filename();
    if (!fs::exists(gt)) throw Error(ErrorCode::kMissingPair, "no ground truth for " + f.string());
    pairs.push_back({f.stem().string(), io::read_cloud(f), io::read_cloud(gt)});
  }
  return pairs;
}

Trainer::Trainer(RunConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  model_ = std::make_unique<net::GeoFormer<float>>(cfg_.model, Rng::derive_seed(cfg_.seed, "model"));
  ad::AdamOptions opts;
  opts.lr = cfg_.lr;
  adam_ = ad::Adam<float>(opts);
  if (!cfg_.dataset.empty()) dataset_ = load_dataset(cfg_.dataset);
}

const Pair& Trainer::sample(std::size_t iter, std::size_t b) {
  if (!dataset_.empty()) {
    return dataset_[(iter * cfg_.batch_size + b) % dataset_.size()];
  }
  const std::uint64_t seed =
      cfg_.fixed_shape ? Rng::derive_seed(cfg_.seed, "data")
                       : Rng::derive_seed(cfg_.seed, "data." + std::to_string(iter * cfg_.batch_size + b));
  if (cfg_.fixed_shape && !scratch_.gt.empty()) return scratch_;
  auto s = synth_generate(cfg_.synth, seed);
  scratch_ = {"synthetic", std::move(s.partial), std::move(s.gt)};
  return scratch_;
}

const Pair& Trainer::held_out() {
  if (!held_out_) {
    auto s = synth_generate(cfg_.synth, Rng::derive_seed(cfg_.seed, "held_out"));
    held_out_ = Pair{"held_out", std::move(s.partial), std::move(s.gt)};
  }
  return *held_out_;
}

const TrainRow& Trainer::step() {
  const auto start = std::chrono::steady_clock::now();
  auto params = model_->parameters().all();
  model_->parameters().zero_grad();
  TrainRow row;
  row.iter = iter_;
  for (std::size_t b = 0; b < cfg_.batch_size; ++b) {
    const Pair& pair = sample(iter_, b);
    ad::Graph<float> g;
    const auto out = model_->forward(g, pair.partial);
    std::array<ad::Tensor<float>, 3> terms;
    auto loss = model_->loss(out, net::cloud_tensor(g, pair.gt), &terms);
    const double value = loss.item();
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "iteration " + std::to_string(iter_) + " sample " + std::to_string(b) +
                      ": loss " + fmt("%g", value) + " (terms " + fmt("%g", terms[0].item()) +
                      ", " + fmt("%g", terms[1].item()) + ", " + fmt("%g", terms[2].item()) + ")");
    }
    if (cfg_.batch_size > 1) loss = ad::scale(loss, 1.0f / static_cast<float>(cfg_.batch_size));
    g.backward(loss);
    const double w = 1.0 / static_cast<double>(cfg_.batch_size);
    row.loss += w * value;
    for (std::size_t k = 0; k < 3; ++k) row.terms[k] += w * terms[k].item();
  }
  if (cfg_.cosine_lr) {
    const double progress = static_cast<double>(iter_) / static_cast<double>(cfg_.iterations);
    adam_.options().lr = 0.5 * cfg_.lr * (1.0 + std::cos(std::numbers::pi * progress));
  }
  adam_.step(params);
  row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  ++iter_;
  log_.rows.push_back(row);
  if (cfg_.eval_every > 0 && iter_ % cfg_.eval_every == 0) {
    const auto& h = held_out();
    const auto c = model_->complete(h.partial);
    log_.evals.push_back({iter_, metrics::evaluate_pair(c.p2, h.gt, &h.partial)});
  }
  return log_.rows.back();
}

void Trainer::run() {
  while (iter_ < cfg_.iterations) {
    step();
    if (cfg_.checkpoint_every > 0 && iter_ % cfg_.checkpoint_every == 0 &&
        iter_ < cfg_.iterations) {
      fs::create_directories(cfg_.output_dir);
      ad::save_parameters(cfg_.output_dir / ("model_" + std::to_string(iter_) + ".gfck"),
                          model_->parameters());
    }
  }
}

TrainLog train(const RunConfig& cfg) {
  Trainer trainer(cfg);
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir / "run.cfg");
    out << to_text(trainer.config());
  }
  trainer.run();
  ad::save_parameters(cfg.output_dir / "model.gfck", trainer.model().parameters());
  write_train_log(cfg.output_dir / "train_log.csv", trainer.log());
  if (!trainer.log().evals.empty()) {
    std::ofstream out(cfg.output_dir / "eval.csv");
    out << "iter,cd_l1,cd_l2,arc_cd,dcd,fscore,fidelity\n";
    for (const auto& e : trainer.log().evals) {
      const auto& r = e.report;
      out << e.iter << "," << opt(r.cd_l1) << "," << opt(r.cd_l2) << "," << opt(r.arc_cd) << ","
          << opt(r.dcd) << "," << opt(r.fscore) << "," << opt(r.fidelity) << "\n";
    }
  }
  return trainer.log();
}

}  // namespace tripoint::pipeline
