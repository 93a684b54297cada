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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tripoint/metrics.hpp"

namespace tripoint::pipeline {

struct PairReport {
  std::string name;  // file stem
  metrics::MetricReport report;
};

// Worker count from TRIPOINT_THREADS, else the hardware concurrency; at least 1.
std::size_t eval_threads();

// Scores every cloud in `pred_dir` against the same-named file in `gt_dir`
// (fidelity too when `partial_dir` is given). Rows are sorted by name.
// Throws MissingPair when a directory has no clouds or a counterpart is
// missing.
std::vector<PairReport> evaluate_dirs(const std::filesystem::path& pred_dir,
                                      const std::filesystem::path& gt_dir,
                                      const std::filesystem::path& partial_dir = {},
                                      std::size_t threads = 0);

// Header `name,cd_l1,cd_l2,arc_cd,dcd,fscore,fidelity`, one row per pair and
// a final `mean` row; missing values are empty fields.
void write_eval_csv(std::ostream& out, const std::vector<PairReport>& rows);
void write_eval_csv(const std::filesystem::path& path, const std::vector<PairReport>& rows);

}  // namespace tripoint::pipeline
