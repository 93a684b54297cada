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

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "tripoint/autodiff/optim.hpp"
#include "tripoint/metrics.hpp"
#include "tripoint/network/model.hpp"
#include "tripoint/pipeline/run_config.hpp"

namespace tripoint::pipeline {

struct TrainRow {
  std::size_t iter = 0;
  double loss = 0.0;
  std::array<double, 3> terms{};
  double ms = 0.0;
};

struct EvalRow {
  std::size_t iter = 0;
  metrics::MetricReport report;
};

struct TrainLog {
  std::vector<TrainRow> rows;
  std::vector<EvalRow> evals;
};

// CSV header `iter,loss,term0,term1,term2,ms`; values use %.9g, ms %.3f.
void write_train_log(std::ostream& out, const TrainLog& log);
void write_train_log(const std::filesystem::path& path, const TrainLog& log);

struct Pair {
  std::string name;
  PointCloud partial;
  PointCloud gt;
};

// Pairs from <dir>/partial/*.{xyz,pcb} matched by file name in <dir>/gt/.
std::vector<Pair> load_dataset(const std::filesystem::path& dir);

// Owns the model and optimizer state for one training run. `step` runs one
// optimizer step over `batch_size` samples and appends to the log.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg);

  const TrainRow& step();
  void run();  // remaining iterations up to cfg.iterations

  const RunConfig& config() const { return cfg_; }
  net::GeoFormer<float>& model() { return *model_; }
  const TrainLog& log() const { return log_; }
  std::size_t iteration() const { return iter_; }

  // Sample used for iteration `iter`, slot `b` of the batch.
  const Pair& sample(std::size_t iter, std::size_t b);
  // Held-out synthetic shape for periodic evaluation.
  const Pair& held_out();

 private:
  RunConfig cfg_;
  std::unique_ptr<net::GeoFormer<float>> model_;
  ad::Adam<float> adam_;
  TrainLog log_;
  std::size_t iter_ = 0;
  std::vector<Pair> dataset_;
  Pair scratch_;
  std::optional<Pair> held_out_;
};

// Full run: trains, writes <output_dir>/train_log.csv, run.cfg,
// model.gfck (plus model_<iter>.gfck every checkpoint_every iterations) and
// eval.csv when eval_every > 0.
TrainLog train(const RunConfig& cfg);

}  // namespace tripoint::pipeline
