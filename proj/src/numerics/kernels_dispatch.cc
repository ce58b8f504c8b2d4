// Copyright (c) 2026 The ttsspk Authors
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

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/kernels.h"

namespace ttsspk::num::kernels {

// Defined in kernels_avx2.cc; returns nullptr when built without AVX2.
const KernelTable* Avx2KernelTableIfCompiled();

namespace {

bool CpuHasAvx2Fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* Resolve(std::string_view name) {
  if (name == "scalar") return &ScalarKernels();
  if (name == "avx2") return Avx2Kernels();
  if (name == "auto" || name.empty()) {
    const KernelTable* avx2 = Avx2Kernels();
    return avx2 != nullptr ? avx2 : &ScalarKernels();
  }
  return nullptr;
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{[] {
    const char* env = std::getenv("TTSSPK_KERNELS");
    const KernelTable* t = Resolve(env != nullptr ? env : "auto");
    return t != nullptr ? t : Resolve("auto");
  }()};
  return slot;
}

}  // namespace

const KernelTable* Avx2Kernels() {
  static const KernelTable* table =
      CpuHasAvx2Fma() ? Avx2KernelTableIfCompiled() : nullptr;
  return table;
}

const KernelTable& ActiveKernels() { return *Slot().load(std::memory_order_acquire); }

void SelectKernels(std::string_view name) {
  const KernelTable* t = Resolve(name);
  if (t == nullptr) {
    throw ConfigError("kernel variant '" + std::string(name) +
                      "' is unknown or unavailable on this CPU");
  }
  Slot().store(t, std::memory_order_release);
}

}  // namespace ttsspk::num::kernels
