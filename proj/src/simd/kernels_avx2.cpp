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

// Compiled with -mavx2 (and deliberately without -mfma). Only reached after a
// runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include <vector>

#include "tripoint/simd.hpp"

namespace tripoint::simd::detail {
namespace {

void sqdist_row_f64(double qx, double qy, double qz, const double* rx, const double* ry,
                    const double* rz, std::size_t n, double* out) {
  const __m256d vx = _mm256_set1_pd(qx);
  const __m256d vy = _mm256_set1_pd(qy);
  const __m256d vz = _mm256_set1_pd(qz);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(rx + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(ry + j));
    const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(rz + j));
    __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    d = _mm256_add_pd(d, _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(out + j, d);
  }
  for (; j < n; ++j) {
    const double dx = qx - rx[j];
    const double dy = qy - ry[j];
    const double dz = qz - rz[j];
    out[j] = dx * dx + dy * dy + dz * dz;
  }
}

Nearest nearest_f64(double qx, double qy, double qz, const double* rx, const double* ry,
                    const double* rz, std::size_t n) {
  Nearest best{0.0, 0};
  std::size_t j = 0;
  if (n >= 4) {
    const __m256d vx = _mm256_set1_pd(qx);
    const __m256d vy = _mm256_set1_pd(qy);
    const __m256d vz = _mm256_set1_pd(qz);
    __m256d best_d = _mm256_set1_pd(__builtin_inf());
    __m256d best_i = _mm256_setzero_pd();
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d step = _mm256_set1_pd(4.0);
    for (; j + 4 <= n; j += 4) {
      const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(rx + j));
      const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(ry + j));
      const __m256d dz = _mm256_sub_pd(vz, _mm256_loadu_pd(rz + j));
      __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      d = _mm256_add_pd(d, _mm256_mul_pd(dz, dz));
      // Strict less keeps the earliest index within each lane.
      const __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
      best_d = _mm256_blendv_pd(best_d, d, lt);
      best_i = _mm256_blendv_pd(best_i, idx, lt);
      idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double lane_d[4];
    alignas(32) double lane_i[4];
    _mm256_store_pd(lane_d, best_d);
    _mm256_store_pd(lane_i, best_i);
    best = {lane_d[0], static_cast<std::size_t>(lane_i[0])};
    for (int l = 1; l < 4; ++l) {
      const auto li = static_cast<std::size_t>(lane_i[l]);
      if (lane_d[l] < best.sqdist || (lane_d[l] == best.sqdist && li < best.index)) {
        best = {lane_d[l], li};
      }
    }
  }
  for (; j < n; ++j) {
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

// 4 x 16 float register block, k innermost. Each lane performs exactly the
// scalar reference sequence acc = acc + a*b.
void gemm_f32(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b,
              float* c, bool accumulate) {
  auto store = [accumulate](float* dst, __m256 v) {
    if (accumulate) v = _mm256_add_ps(_mm256_loadu_ps(dst), v);
    _mm256_storeu_ps(dst, v);
  };
  auto tail = [&](std::size_t i, std::size_t j) {
    float acc = 0.0f;
    for (std::size_t kk = 0; kk < k; ++kk) acc = acc + a[i * k + kk] * b[kk * n + j];
    c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
  };
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
      __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
      __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
      __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
      __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
      const float* a0 = a + i * k;
      const float* a1 = a0 + k;
      const float* a2 = a1 + k;
      const float* a3 = a2 + k;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256 b0 = _mm256_loadu_ps(b + kk * n + j);
        const __m256 b1 = _mm256_loadu_ps(b + kk * n + j + 8);
        __m256 av = _mm256_set1_ps(a0[kk]);
        c00 = _mm256_add_ps(c00, _mm256_mul_ps(av, b0));
        c01 = _mm256_add_ps(c01, _mm256_mul_ps(av, b1));
        av = _mm256_set1_ps(a1[kk]);
        c10 = _mm256_add_ps(c10, _mm256_mul_ps(av, b0));
        c11 = _mm256_add_ps(c11, _mm256_mul_ps(av, b1));
        av = _mm256_set1_ps(a2[kk]);
        c20 = _mm256_add_ps(c20, _mm256_mul_ps(av, b0));
        c21 = _mm256_add_ps(c21, _mm256_mul_ps(av, b1));
        av = _mm256_set1_ps(a3[kk]);
        c30 = _mm256_add_ps(c30, _mm256_mul_ps(av, b0));
        c31 = _mm256_add_ps(c31, _mm256_mul_ps(av, b1));
      }
      store(c + i * n + j, c00);
      store(c + i * n + j + 8, c01);
      store(c + (i + 1) * n + j, c10);
      store(c + (i + 1) * n + j + 8, c11);
      store(c + (i + 2) * n + j, c20);
      store(c + (i + 2) * n + j + 8, c21);
      store(c + (i + 3) * n + j, c30);
      store(c + (i + 3) * n + j + 8, c31);
    }
    for (; j + 8 <= n; j += 8) {
      __m256 acc[4] = {_mm256_setzero_ps(), _mm256_setzero_ps(), _mm256_setzero_ps(),
                       _mm256_setzero_ps()};
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256 bv = _mm256_loadu_ps(b + kk * n + j);
        for (int r = 0; r < 4; ++r) {
          acc[r] = _mm256_add_ps(acc[r], _mm256_mul_ps(_mm256_set1_ps(a[(i + r) * k + kk]), bv));
        }
      }
      for (int r = 0; r < 4; ++r) store(c + (i + r) * n + j, acc[r]);
    }
    for (; j < n; ++j) {
      for (std::size_t r = 0; r < 4; ++r) tail(i + r, j);
    }
  }
  for (; i < m; ++i) {
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (std::size_t kk = 0; kk < k; ++kk) {
        acc = _mm256_add_ps(acc,
                            _mm256_mul_ps(_mm256_set1_ps(a[i * k + kk]), _mm256_loadu_ps(b + kk * n + j)));
      }
      store(c + i * n + j, acc);
    }
    for (; j < n; ++j) tail(i, j);
  }
}

void gemm_f64(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
              double* c, bool accumulate) {
  auto store = [accumulate](double* dst, __m256d v) {
    if (accumulate) v = _mm256_add_pd(_mm256_loadu_pd(dst), v);
    _mm256_storeu_pd(dst, v);
  };
  auto tail = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t kk = 0; kk < k; ++kk) acc = acc + a[i * k + kk] * b[kk * n + j];
    c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
  };
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d acc[4][2];
      for (auto& row : acc) row[0] = row[1] = _mm256_setzero_pd();
      for (std::size_t kk = 0; kk < k; ++kk) {
        const __m256d b0 = _mm256_loadu_pd(b + kk * n + j);
        const __m256d b1 = _mm256_loadu_pd(b + kk * n + j + 4);
        for (int r = 0; r < 4; ++r) {
          const __m256d av = _mm256_set1_pd(a[(i + r) * k + kk]);
          acc[r][0] = _mm256_add_pd(acc[r][0], _mm256_mul_pd(av, b0));
          acc[r][1] = _mm256_add_pd(acc[r][1], _mm256_mul_pd(av, b1));
        }
      }
      for (int r = 0; r < 4; ++r) {
        store(c + (i + r) * n + j, acc[r][0]);
        store(c + (i + r) * n + j + 4, acc[r][1]);
      }
    }
    for (; j < n; ++j) {
      for (std::size_t r = 0; r < 4; ++r) tail(i + r, j);
    }
  }
  for (; i < m; ++i) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t kk = 0; kk < k; ++kk) {
        acc = _mm256_add_pd(acc,
                            _mm256_mul_pd(_mm256_set1_pd(a[i * k + kk]), _mm256_loadu_pd(b + kk * n + j)));
      }
      store(c + i * n + j, acc);
    }
    for (; j < n; ++j) tail(i, j);
  }
}

void pairwise_sqdist_f32(const float* p, std::size_t np, const float* qx, const float* qy,
                         const float* qz, std::size_t nq, float* out) {
  for (std::size_t i = 0; i < np; ++i) {
    const float px = p[3 * i], py = p[3 * i + 1], pz = p[3 * i + 2];
    const __m256 vx = _mm256_set1_ps(px);
    const __m256 vy = _mm256_set1_ps(py);
    const __m256 vz = _mm256_set1_ps(pz);
    float* row = out + i * nq;
    std::size_t j = 0;
    for (; j + 8 <= nq; j += 8) {
      const __m256 dx = _mm256_sub_ps(vx, _mm256_loadu_ps(qx + j));
      const __m256 dy = _mm256_sub_ps(vy, _mm256_loadu_ps(qy + j));
      const __m256 dz = _mm256_sub_ps(vz, _mm256_loadu_ps(qz + j));
      __m256 d = _mm256_add_ps(_mm256_mul_ps(dx, dx), _mm256_mul_ps(dy, dy));
      d = _mm256_add_ps(d, _mm256_mul_ps(dz, dz));
      _mm256_storeu_ps(row + j, d);
    }
    for (; j < nq; ++j) {
      const float dx = px - qx[j];
      const float dy = py - qy[j];
      const float dz = pz - qz[j];
      row[j] = dx * dx + dy * dy + dz * dz;
    }
  }
}

void pairwise_sqdist_f64(const double* p, std::size_t np, const double* qx, const double* qy,
                         const double* qz, std::size_t nq, double* out) {
  for (std::size_t i = 0; i < np; ++i) {
    sqdist_row_f64(p[3 * i], p[3 * i + 1], p[3 * i + 2], qx, qy, qz, nq, out + i * nq);
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels table{
      Isa::kAvx2, &sqdist_row_f64,      &nearest_f64,         &gemm_f32,
      &gemm_f64,  &pairwise_sqdist_f32, &pairwise_sqdist_f64,
  };
  return table;
}

}  // namespace tripoint::simd::detail
