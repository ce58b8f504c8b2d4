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

#ifndef TTSSPK_NUMERICS_ADAM_H_
#define TTSSPK_NUMERICS_ADAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttsspk/numerics/tensor.h"

namespace ttsspk::num {

struct NamedParameter {
  std::string name;
  Tensor value;
};

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::int64_t step_count = 0;

  // Zero moments shaped like `params`.
  static AdamState For(std::span<const NamedParameter> params, AdamHyper hyper);
};

// One bias-corrected Adam update using each parameter's accumulated grad
// (parameters without a grad buffer are treated as having zero gradient).
// Throws NumericError naming the first parameter with a non-finite gradient;
// nothing is updated in that case.
void AdamStep(std::span<NamedParameter> params, AdamState& state);

// Global L2 norm over all gradient buffers.
double GradientNorm(std::span<const NamedParameter> params);

// Rescales all gradients so their global norm is at most `max_norm`.
// Returns the norm before clipping.
double ClipGradientNorm(std::span<NamedParameter> params, double max_norm);

void ZeroGradients(std::span<NamedParameter> params);

}  // namespace ttsspk::num

#endif  // TTSSPK_NUMERICS_ADAM_H_
