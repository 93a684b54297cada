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

#include <vector>

#include "tripoint/simd.hpp"

namespace tripoint::simd::detail {
namespace {

void sqdist_row_f64(double qx, double qy, double qz, const double* rx, const double* ry,
                    const double* rz, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = qx - rx[j];
    const double dy = qy - ry[j];
    const double dz = qz - rz[j];
    out[j] = dx * dx + dy * dy + dz * dz;
  }
}

Nearest nearest_f64(double qx, double qy, double qz, const double* rx, const double* ry,
                    const double* rz, std::size_t n) {
  Nearest best{0.0, 0};
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = qx - rx[j];
    const double dy = qy - ry[j];
    const double dz = qz - rz[j];
    const double d = dx * dx + dy * dy + dz * dz;
    if (j == 0 || d < best.sqdist) {
      best = {d, j};
    }
  }
  return best;
}

// Row-at-a-time accumulation: every C element sums its k products in
// ascending k starting from zero. SIMD variants follow the same order.
template <typename T>
void gemm(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
          bool accumulate) {
  std::vector<T> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(row.begin(), row.end(), T(0));
    for (std::size_t kk = 0; kk < k; ++kk) {
      const T aik = a[i * k + kk];
      const T* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = row[j] + aik * brow[j];
      }
    }
    T* crow = c + i * n;
    if (accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + row[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) crow[j] = row[j];
    }
  }
}

template <typename T>
void pairwise_sqdist(const T* p, std::size_t np, const T* qx, const T* qy, const T* qz,
                     std::size_t nq, T* out) {
  for (std::size_t i = 0; i < np; ++i) {
    const T px = p[3 * i], py = p[3 * i + 1], pz = p[3 * i + 2];
    T* row = out + i * nq;
    for (std::size_t j = 0; j < nq; ++j) {
      const T dx = px - qx[j];
      const T dy = py - qy[j];
      const T dz = pz - qz[j];
      row[j] = dx * dx + dy * dy + dz * dz;
    }
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{
      Isa::kScalar,   &sqdist_row_f64,          &nearest_f64,
      &gemm<float>,   &gemm<double>,            &pairwise_sqdist<float>,
      &pairwise_sqdist<double>,
  };
  return table;
}

}  // namespace tripoint::simd::detail
