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

#ifndef TTSSPK_NUMERICS_KERNELS_H_
#define TTSSPK_NUMERICS_KERNELS_H_

#include <cstddef>
#include <string_view>

// Dense double-precision inner loops used by the tensor ops. Each kernel set
// has a portable scalar reference and, on x86-64, an AVX2+FMA variant. The
// active set is chosen once at runtime from CPU features and can be forced
// with TTSSPK_KERNELS={scalar,avx2} or SelectKernels().
//
// All matrices are row-major and densely packed. The gemm kernels accumulate
// into C (C += ...), they never overwrite it.

namespace ttsspk::num::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
  // C[m x n] += A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
  // C[m x n] += A[k x m]^T * B[k x n]
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
};

const KernelTable& ScalarKernels();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* Avx2Kernels();

const KernelTable& ActiveKernels();

// Accepts "scalar", "avx2" or "auto". Throws ConfigError for an unknown or
// unavailable variant.
void SelectKernels(std::string_view name);

}  // namespace ttsspk::num::kernels

#endif  // TTSSPK_NUMERICS_KERNELS_H_
