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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/kernels.h"

namespace ttsspk::num::kernels {
namespace {

std::vector<double> Random(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

void ExpectClose(const std::vector<double>& a, const std::vector<double>& b,
                 double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], tol * (1.0 + std::abs(a[i]))) << "index " << i;
  }
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = Avx2Kernels();
    if (simd_ == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable";
  }
  const KernelTable* simd_ = nullptr;
};

TEST_F(KernelEquivalence, DotAndAxpy) {
  std::mt19937_64 rng(11);
  const KernelTable& ref = ScalarKernels();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 17u, 63u, 129u}) {
    auto a = Random(n, rng), b = Random(n, rng);
    EXPECT_NEAR(ref.dot(a.data(), b.data(), n), simd_->dot(a.data(), b.data(), n), 1e-12);
    auto y1 = Random(n, rng);
    auto y2 = y1;
    ref.axpy(0.37, a.data(), y1.data(), n);
    simd_->axpy(0.37, a.data(), y2.data(), n);
    ExpectClose(y1, y2, 1e-14);
  }
}

TEST_F(KernelEquivalence, GemmVariantsOnRaggedShapes) {
  std::mt19937_64 rng(12);
  const KernelTable& ref = ScalarKernels();
  std::uniform_int_distribution<std::size_t> ext(1, 37);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = ext(rng), n = ext(rng), k = ext(rng);
    auto a = Random(m * k, rng), b = Random(k * n, rng), bt = Random(n * k, rng);
    auto c0 = Random(m * n, rng);
    auto c1 = c0;
    ref.gemm_nn(m, n, k, a.data(), b.data(), c0.data());
    simd_->gemm_nn(m, n, k, a.data(), b.data(), c1.data());
    ExpectClose(c0, c1, 1e-12);

    auto d0 = Random(m * n, rng);
    auto d1 = d0;
    ref.gemm_nt(m, n, k, a.data(), bt.data(), d0.data());
    simd_->gemm_nt(m, n, k, a.data(), bt.data(), d1.data());
    ExpectClose(d0, d1, 1e-12);

    // A stored k x m.
    auto e0 = Random(m * n, rng);
    auto e1 = e0;
    ref.gemm_tn(m, n, k, a.data(), b.data(), e0.data());
    simd_->gemm_tn(m, n, k, a.data(), b.data(), e1.data());
    ExpectClose(e0, e1, 1e-12);
  }
}

TEST(KernelSelection, ScalarAlwaysAvailableAndUnknownRejected) {
  const KernelTable& before = ActiveKernels();
  SelectKernels("scalar");
  EXPECT_STREQ(ActiveKernels().name, "scalar");
  SelectKernels("auto");
  EXPECT_THROW(SelectKernels("neon-fp128"), ConfigError);
  SelectKernels(before.name);
}

}  // namespace
}  // namespace ttsspk::num::kernels
