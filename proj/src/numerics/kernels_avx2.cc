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

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check, so nothing here may be called on hosts without AVX2.

#include "ttsspk/numerics/kernels.h"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace ttsspk::num::kernels {
namespace {

inline double HorizontalSum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8),
                           _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12),
                           _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  double s = HorizontalSum(acc0);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                     _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// MR x 8 register block of C += A * B. `a_stride_row` / `a_stride_k` let the
// same block serve both the NN (A row-major m x k) and TN (A stored k x m)
// layouts.
template <int MR>
inline void Block8(std::size_t k, const double* a, std::size_t a_stride_row,
                   std::size_t a_stride_k, const double* b, std::size_t ldb,
                   double* c, std::size_t ldc) {
  __m256d acc[MR][2];
  for (int r = 0; r < MR; ++r) {
    acc[r][0] = _mm256_setzero_pd();
    acc[r][1] = _mm256_setzero_pd();
  }
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb);
    const __m256d b1 = _mm256_loadu_pd(b + p * ldb + 4);
    for (int r = 0; r < MR; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * a_stride_row + p * a_stride_k);
      acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < MR; ++r) {
    double* crow = c + r * ldc;
    _mm256_storeu_pd(crow, _mm256_add_pd(_mm256_loadu_pd(crow), acc[r][0]));
    _mm256_storeu_pd(crow + 4,
                     _mm256_add_pd(_mm256_loadu_pd(crow + 4), acc[r][1]));
  }
}

template <int MR>
inline void Block4(std::size_t k, const double* a, std::size_t a_stride_row,
                   std::size_t a_stride_k, const double* b, std::size_t ldb,
                   double* c, std::size_t ldc) {
  __m256d acc[MR];
  for (int r = 0; r < MR; ++r) acc[r] = _mm256_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb);
    for (int r = 0; r < MR; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * a_stride_row + p * a_stride_k);
      acc[r] = _mm256_fmadd_pd(av, b0, acc[r]);
    }
  }
  for (int r = 0; r < MR; ++r) {
    double* crow = c + r * ldc;
    _mm256_storeu_pd(crow, _mm256_add_pd(_mm256_loadu_pd(crow), acc[r]));
  }
}

template <int MR>
inline void BlockTail(std::size_t k, std::size_t cols, const double* a,
                      std::size_t a_stride_row, std::size_t a_stride_k,
                      const double* b, std::size_t ldb, double* c,
                      std::size_t ldc) {
  for (int r = 0; r < MR; ++r) {
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        s += a[r * a_stride_row + p * a_stride_k] * b[p * ldb + j];
      }
      c[r * ldc + j] += s;
    }
  }
}

template <int MR>
inline void RowPanel(std::size_t n, std::size_t k, const double* a,
                     std::size_t a_stride_row, std::size_t a_stride_k,
                     const double* b, double* c) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    Block8<MR>(k, a, a_stride_row, a_stride_k, b + j, n, c + j, n);
  }
  for (; j + 4 <= n; j += 4) {
    Block4<MR>(k, a, a_stride_row, a_stride_k, b + j, n, c + j, n);
  }
  if (j < n) {
    BlockTail<MR>(k, n - j, a, a_stride_row, a_stride_k, b + j, n, c + j, n);
  }
}

void GemmPanels(std::size_t m, std::size_t n, std::size_t k, const double* a,
                std::size_t a_stride_row, std::size_t a_stride_k,
                const double* b, double* c) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    RowPanel<4>(n, k, a + i * a_stride_row, a_stride_row, a_stride_k, b,
                c + i * n);
  }
  switch (m - i) {
    case 3:
      RowPanel<3>(n, k, a + i * a_stride_row, a_stride_row, a_stride_k, b,
                  c + i * n);
      break;
    case 2:
      RowPanel<2>(n, k, a + i * a_stride_row, a_stride_row, a_stride_k, b,
                  c + i * n);
      break;
    case 1:
      RowPanel<1>(n, k, a + i * a_stride_row, a_stride_row, a_stride_k, b,
                  c + i * n);
      break;
    default:
      break;
  }
}

void GemmNN(std::size_t m, std::size_t n, std::size_t k, const double* a,
            const double* b, double* c) {
  GemmPanels(m, n, k, a, k, 1, b, c);
}

void GemmTN(std::size_t m, std::size_t n, std::size_t k, const double* a,
            const double* b, double* c) {
  GemmPanels(m, n, k, a, 1, m, b, c);
}

void GemmNT(std::size_t m, std::size_t n, std::size_t k, const double* a,
            const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      __m256d s0 = _mm256_setzero_pd();
      __m256d s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd();
      __m256d s3 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d av = _mm256_loadu_pd(arow + p);
        s0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + p), s0);
        s1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + p), s1);
        s2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b2 + p), s2);
        s3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b3 + p), s3);
      }
      double t0 = HorizontalSum(s0);
      double t1 = HorizontalSum(s1);
      double t2 = HorizontalSum(s2);
      double t3 = HorizontalSum(s3);
      for (; p < k; ++p) {
        t0 += arow[p] * b0[p];
        t1 += arow[p] * b1[p];
        t2 += arow[p] * b2[p];
        t3 += arow[p] * b3[p];
      }
      double* crow = c + i * n + j;
      crow[0] += t0;
      crow[1] += t1;
      crow[2] += t2;
      crow[3] += t3;
    }
    for (; j < n; ++j) c[i * n + j] += Dot(arow, b + j * k, k);
  }
}

}  // namespace

const KernelTable* Avx2KernelTableIfCompiled() {
  static const KernelTable table{"avx2", Dot, Axpy, GemmNN, GemmNT, GemmTN};
  return &table;
}

}  // namespace ttsspk::num::kernels

#else

namespace ttsspk::num::kernels {
const KernelTable* Avx2KernelTableIfCompiled() { return nullptr; }
}  // namespace ttsspk::num::kernels

#endif
