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

#ifndef TTSSPK_MODEL_LOSSES_H_
#define TTSSPK_MODEL_LOSSES_H_

#include <cstddef>
#include <cstdint>

#include "ttsspk/numerics/tensor.h"

namespace ttsspk::model {

inline constexpr double kStopPositiveWeight = 5.0;

struct TtsLoss {
  num::Tensor l1;
  num::Tensor l2;
  num::Tensor stop_bce;
};

// pred/target [T x D_a]; stop_logits hold one logit per decoder step, whose
// target is 1 only at the last step.
TtsLoss ComputeTtsLoss(const num::Tensor& pred, const num::Tensor& target,
                       const num::Tensor& stop_logits);

// lambda = max(5, 1000 / (1 + 0.1 * step))
double AnnealedLambda(std::int64_t step);

// Angular-margin softmax cross entropy of e [1 x D_e] against the class
// weights proj [D_e x S] (columns are normalized inside).
num::Tensor AngularSoftmaxLoss(const num::Tensor& embedding, const num::Tensor& proj,
                               std::size_t label, int margin, double lambda);

struct JointLossValues {
  double l1 = 0.0;
  double l2 = 0.0;
  double stop_bce = 0.0;
  double l_spk = 0.0;
  double total = 0.0;
};

struct JointLoss {
  num::Tensor total;
  JointLossValues values;
};

// total = l1 + l2 + stop_bce + w * l_spk. With w == 0 the speaker term is
// left out of the graph, and `l_spk` may be empty.
JointLoss CombineLosses(const TtsLoss& tts, const num::Tensor& l_spk, double weight);

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_LOSSES_H_
