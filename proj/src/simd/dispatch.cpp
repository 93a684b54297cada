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

#include <atomic>
#include <cstdlib>
#include <string>

#include "tripoint/error.hpp"
#include "tripoint/simd.hpp"

namespace tripoint::simd {
namespace {

const Kernels* initial_table() {
  const char* env = std::getenv("TRIPOINT_SIMD");
  if (env != nullptr && std::string(env) == "scalar") {
    return &detail::scalar_kernels();
  }
  return &kernels_for(detected_isa());
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{initial_table()};
  return slot;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() { return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::kUnsupportedIsa, std::string(isa_name(isa)));
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::kAvx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

const Kernels& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace tripoint::simd
