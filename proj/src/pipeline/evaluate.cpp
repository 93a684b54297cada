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

#include "tripoint/pipeline/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "tripoint/error.hpp"
#include "tripoint/point_io.hpp"

namespace tripoint::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> cloud_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kUnreadableFile, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && io::is_cloud_file(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace

std::size_t eval_threads() {
  if (const char* env = std::getenv("TRIPOINT_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PairReport> evaluate_dirs(const fs::path& pred_dir, const fs::path& gt_dir,
                                      const fs::path& partial_dir, std::size_t threads) {
  const auto preds = cloud_files(pred_dir);
  const auto gts = cloud_files(gt_dir);
  if (preds.empty()) throw Error(ErrorCode::kMissingPair, "no clouds in " + pred_dir.string());
  if (gts.empty()) throw Error(ErrorCode::kMissingPair, "no clouds in " + gt_dir.string());
  for (const auto& p : preds) {
    if (!fs::exists(gt_dir / p.filename())) {
      throw Error(ErrorCode::kMissingPair, "no ground truth for " + p.filename().string());
    }
    if (!partial_dir.empty() && !fs::exists(partial_dir / p.filename())) {
      throw Error(ErrorCode::kMissingPair, "no partial input for " + p.filename().string());
    }
  }

  std::vector<PairReport> rows(preds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= preds.size()) return;
      try {
        const auto pred = io::read_cloud(preds[i]);
        const auto gt = io::read_cloud(gt_dir / preds[i].filename());
        std::optional<PointCloud> partial;
        if (!partial_dir.empty()) partial = io::read_cloud(partial_dir / preds[i].filename());
        rows[i] = {preds[i].stem().string(),
                   metrics::evaluate_pair(pred, gt, partial ? &*partial : nullptr)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(preds.size(), threads == 0 ? eval_threads() : threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_eval_csv(std::ostream& out, const std::vector<PairReport>& rows) {
  using Field = std::optional<double> metrics::MetricReport::*;
  static constexpr Field kFields[] = {
      &metrics::MetricReport::cd_l1, &metrics::MetricReport::cd_l2, &metrics::MetricReport::arc_cd,
      &metrics::MetricReport::dcd,   &metrics::MetricReport::fscore,
      &metrics::MetricReport::fidelity};
  out << "name,cd_l1,cd_l2,arc_cd,dcd,fscore,fidelity\n";
  for (const auto& r : rows) {
    out << r.name;
    for (const auto f : kFields) out << "," << cell(r.report.*f);
    out << "\n";
  }
  out << "mean";
  for (const auto f : kFields) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (const auto& v = r.report.*f) {
        total += *v;
        ++count;
      }
    }
    out << "," << (count > 0 ? cell(total / static_cast<double>(count)) : "");
  }
  out << "\n";
}

void write_eval_csv(const fs::path& path, const std::vector<PairReport>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot write " + path.string());
  write_eval_csv(out, rows);
}

}  // namespace tripoint::pipeline
