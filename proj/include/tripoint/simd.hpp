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

// Data-parallel inner loops used by the metrics, the point primitives and the
// tensor engine. Every kernel has a scalar reference implementation; SIMD
// variants are selected at runtime and must produce bitwise-identical output
// (same operation order per element, no fused multiply-add).

#include <cstddef>
#include <string_view>

namespace tripoint::simd {

enum class Isa { kScalar, kAvx2 };

struct Nearest {
  double sqdist;
  std::size_t index;
};

struct Kernels {
  Isa isa;

  // out[j] = |q - r_j|^2 for reference points in structure-of-arrays layout.
  void (*sqdist_row_f64)(double qx, double qy, double qz, const double* rx, const double* ry,
                         const double* rz, std::size_t n, double* out);

  // Nearest reference point to q; ties go to the lowest index. n >= 1.
  Nearest (*nearest_f64)(double qx, double qy, double qz, const double* rx, const double* ry,
                         const double* rz, std::size_t n);

  // C(m x n) = A(m x k) * B(k x n), row-major and contiguous. With accumulate
  // the product is added to the existing contents of C.
  void (*gemm_f32)(std::size_t m, std::size_t n, std::size_t k, const float* a, const float* b,
                   float* c, bool accumulate);
  void (*gemm_f64)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                   double* c, bool accumulate);

  // out(np x nq) = squared distances between p (np x 3, row-major) and q
  // given as three coordinate arrays of length nq.
  void (*pairwise_sqdist_f32)(const float* p, std::size_t np, const float* qx, const float* qy,
                              const float* qz, std::size_t nq, float* out);
  void (*pairwise_sqdist_f64)(const double* p, std::size_t np, const double* qx, const double* qy,
                              const double* qz, std::size_t nq, double* out);
};

bool isa_supported(Isa isa);
Isa detected_isa();
std::string_view isa_name(Isa isa);

// Kernel table for a specific ISA. Throws UnsupportedIsa when the CPU or the
// build lacks it.
const Kernels& kernels_for(Isa isa);

// The process-wide active table. Starts at detected_isa(), or at "scalar" when
// the environment variable TRIPOINT_SIMD=scalar is set.
const Kernels& active();
void set_active_isa(Isa isa);

template <typename T>
inline void gemm(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
                 bool accumulate) {
  if constexpr (sizeof(T) == sizeof(float)) {
    active().gemm_f32(m, n, k, a, b, c, accumulate);
  } else {
    active().gemm_f64(m, n, k, a, b, c, accumulate);
  }
}

template <typename T>
inline void pairwise_sqdist(const T* p, std::size_t np, const T* qx, const T* qy, const T* qz,
                            std::size_t nq, T* out) {
  if constexpr (sizeof(T) == sizeof(float)) {
    active().pairwise_sqdist_f32(p, np, qx, qy, qz, nq, out);
  } else {
    active().pairwise_sqdist_f64(p, np, qx, qy, qz, nq, out);
  }
}

namespace detail {
const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif
}  // namespace detail

}  // namespace tripoint::simd
