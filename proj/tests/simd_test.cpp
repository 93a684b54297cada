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

#include <gtest/gtest.h>

#include <cstring>
#include <vector>

#include "tripoint/rng.hpp"
#include "tripoint/simd.hpp"

namespace tripoint::simd {
namespace {

template <typename T>
std::vector<T> random_vec(Rng& rng, std::size_t n) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(rng.uniform(-1.0, 1.0));
  return v;
}

template <typename T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_supported(Isa::kAvx2)) GTEST_SKIP() << "AVX2 unavailable";
  }
  const Kernels& scalar = kernels_for(Isa::kScalar);
  const Kernels& vec() { return kernels_for(Isa::kAvx2); }
};

TEST_F(SimdEquivalence, SqdistRowMatchesScalarBitwise) {
  Rng rng(1);
  for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 64u, 101u}) {
    auto x = random_vec<double>(rng, n), y = random_vec<double>(rng, n),
         z = random_vec<double>(rng, n);
    std::vector<double> a(n), b(n);
    scalar.sqdist_row_f64(0.1, -0.2, 0.3, x.data(), y.data(), z.data(), n, a.data());
    vec().sqdist_row_f64(0.1, -0.2, 0.3, x.data(), y.data(), z.data(), n, b.data());
    EXPECT_TRUE(bitwise_equal(a, b)) << "n=" << n;
  }
}

TEST_F(SimdEquivalence, NearestMatchesScalarIncludingTies) {
  Rng rng(2);
  for (std::size_t n : {1u, 2u, 7u, 8u, 33u, 200u}) {
    auto x = random_vec<double>(rng, n), y = random_vec<double>(rng, n),
         z = random_vec<double>(rng, n);
    // Duplicate the first point at the end to force a tie.
    x.push_back(x[0]);
    y.push_back(y[0]);
    z.push_back(z[0]);
    const auto a = scalar.nearest_f64(x[0], y[0], z[0], x.data(), y.data(), z.data(), n + 1);
    const auto b = vec().nearest_f64(x[0], y[0], z[0], x.data(), y.data(), z.data(), n + 1);
    EXPECT_EQ(a.index, 0u);
    EXPECT_EQ(a.index, b.index);
    EXPECT_EQ(std::memcmp(&a.sqdist, &b.sqdist, sizeof(double)), 0);
    const auto c = scalar.nearest_f64(0.05, 0.05, 0.05, x.data(), y.data(), z.data(), n + 1);
    const auto d = vec().nearest_f64(0.05, 0.05, 0.05, x.data(), y.data(), z.data(), n + 1);
    EXPECT_EQ(c.index, d.index);
    EXPECT_EQ(std::memcmp(&c.sqdist, &d.sqdist, sizeof(double)), 0);
  }
}

template <typename T>
void check_gemm(const Kernels& s, const Kernels& v) {
  Rng rng(3);
  const std::size_t dims[][3] = {{1, 1, 1}, {3, 5, 7}, {8, 8, 8}, {17, 33, 9}, {64, 19, 40}};
  for (const auto& d : dims) {
    auto a = random_vec<T>(rng, d[0] * d[2]);
    auto b = random_vec<T>(rng, d[2] * d[1]);
    for (bool acc : {false, true}) {
      auto c1 = random_vec<T>(rng, d[0] * d[1]);
      auto c2 = c1;
      if constexpr (sizeof(T) == 4) {
        s.gemm_f32(d[0], d[1], d[2], a.data(), b.data(), c1.data(), acc);
        v.gemm_f32(d[0], d[1], d[2], a.data(), b.data(), c2.data(), acc);
      } else {
        s.gemm_f64(d[0], d[1], d[2], a.data(), b.data(), c1.data(), acc);
        v.gemm_f64(d[0], d[1], d[2], a.data(), b.data(), c2.data(), acc);
      }
      EXPECT_TRUE(bitwise_equal(c1, c2)) << d[0] << "x" << d[1] << "x" << d[2] << " acc=" << acc;
    }
  }
}

TEST_F(SimdEquivalence, GemmF32MatchesScalarBitwise) { check_gemm<float>(scalar, vec()); }
TEST_F(SimdEquivalence, GemmF64MatchesScalarBitwise) { check_gemm<double>(scalar, vec()); }

template <typename T>
void check_pairwise(const Kernels& s, const Kernels& v) {
  Rng rng(4);
  for (std::size_t np : {1u, 5u, 16u}) {
    for (std::size_t nq : {1u, 7u, 8u, 9u, 70u}) {
      auto p = random_vec<T>(rng, np * 3);
      auto qx = random_vec<T>(rng, nq), qy = random_vec<T>(rng, nq), qz = random_vec<T>(rng, nq);
      std::vector<T> o1(np * nq), o2(np * nq);
      if constexpr (sizeof(T) == 4) {
        s.pairwise_sqdist_f32(p.data(), np, qx.data(), qy.data(), qz.data(), nq, o1.data());
        v.pairwise_sqdist_f32(p.data(), np, qx.data(), qy.data(), qz.data(), nq, o2.data());
      } else {
        s.pairwise_sqdist_f64(p.data(), np, qx.data(), qy.data(), qz.data(), nq, o1.data());
        v.pairwise_sqdist_f64(p.data(), np, qx.data(), qy.data(), qz.data(), nq, o2.data());
      }
      EXPECT_TRUE(bitwise_equal(o1, o2)) << np << "x" << nq;
    }
  }
}

TEST_F(SimdEquivalence, PairwiseF32MatchesScalarBitwise) { check_pairwise<float>(scalar, vec()); }
TEST_F(SimdEquivalence, PairwiseF64MatchesScalarBitwise) { check_pairwise<double>(scalar, vec()); }

TEST(SimdDispatch, ScalarAlwaysSupported) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  EXPECT_EQ(kernels_for(Isa::kScalar).isa, Isa::kScalar);
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
}

TEST(SimdDispatch, SetActiveSwitchesTable) {
  const Isa original = active().isa;
  set_active_isa(Isa::kScalar);
  EXPECT_EQ(active().isa, Isa::kScalar);
  set_active_isa(original);
  EXPECT_EQ(active().isa, original);
}

}  // namespace
}  // namespace tripoint::simd
