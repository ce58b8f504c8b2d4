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

#ifndef TTSSPK_TESTS_TEST_SUPPORT_H_
#define TTSSPK_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ttsspk/numerics/adam.h"
#include "ttsspk/numerics/tape.h"
#include "ttsspk/numerics/tensor.h"

namespace ttsspk::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ttsspk_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline num::Tensor RandomTensor(num::Shape shape, std::mt19937_64& rng,
                                double scale = 1.0, bool requires_grad = true) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(num::NumElements(shape));
  for (double& x : v) x = dist(rng);
  return num::Tensor(std::move(shape), std::move(v), requires_grad);
}

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

// Relative error with a floor on the denominator so that gradients that are
// zero up to rounding do not blow the ratio up.
inline double RelativeError(double analytic, double numeric,
                            double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

// Compares tape gradients of `loss_fn` against central differences for every
// element of every parameter. `loss_fn` must rebuild the graph on each call.
inline GradCheckResult CheckGradients(const std::function<num::Tensor()>& loss_fn,
                                      std::vector<num::NamedParameter> params,
                                      double eps = 1e-5) {
  for (auto& p : params) p.value.ZeroGrad();
  {
    num::Tape tape;
    num::TapeScope scope(tape);
    num::Tensor loss = loss_fn();
    tape.Backward(loss);
  }
  GradCheckResult result;
  for (auto& p : params) {
    std::vector<double> analytic(p.value.size(), 0.0);
    if (p.value.has_grad()) {
      std::copy(p.value.grad().begin(), p.value.grad().end(), analytic.begin());
    }
    auto data = p.value.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double orig = data[i];
      double plus = 0.0, minus = 0.0;
      {
        num::NoGradScope ng;
        data[i] = orig + eps;
        plus = loss_fn().item();
        data[i] = orig - eps;
        minus = loss_fn().item();
        data[i] = orig;
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = RelativeError(analytic[i], numeric);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = p.name + "[" + std::to_string(i) + "] analytic=" +
                       std::to_string(analytic[i]) +
                       " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace ttsspk::testing

#endif  // TTSSPK_TESTS_TEST_SUPPORT_H_
