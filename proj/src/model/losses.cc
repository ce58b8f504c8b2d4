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

#include "ttsspk/model/losses.h"

#include <algorithm>
#include <vector>

#include "ttsspk/common/error.h"
#include "ttsspk/model/layers.h"
#include "ttsspk/numerics/ops.h"

namespace ttsspk::model {

using num::Tensor;

TtsLoss ComputeTtsLoss(const Tensor& pred, const Tensor& target, const Tensor& stop_logits) {
  if (pred.shape() != target.shape()) {
    throw DimensionError("tts loss: prediction " + num::ShapeString(pred.shape()) +
                         " vs target " + num::ShapeString(target.shape()));
  }
  const Tensor diff = num::Sub(pred, target);
  std::vector<double> stop_targets(stop_logits.size(), 0.0);
  stop_targets.back() = 1.0;
  return {num::Mean(num::Abs(diff)), num::Mean(num::Square(diff)),
          num::BceWithLogits(stop_logits, stop_targets, kStopPositiveWeight)};
}

double AnnealedLambda(std::int64_t step) {
  return std::max(5.0, 1000.0 / (1.0 + 0.1 * static_cast<double>(step)));
}

Tensor AngularSoftmaxLoss(const Tensor& embedding, const Tensor& proj, std::size_t label,
                          int margin, double lambda) {
  if (proj.rank() != 2 || proj.dim(0) != embedding.size()) {
    throw DimensionError("angular softmax: embedding " + num::ShapeString(embedding.shape()) +
                         " vs class weights " + num::ShapeString(proj.shape()));
  }
  const std::size_t d = proj.dim(0), s = proj.dim(1);
  if (label >= s) {
    throw DimensionError("angular softmax: label " + std::to_string(label) + " >= " +
                         std::to_string(s) + " classes");
  }
  const Tensor e = num::Reshape(embedding, {1, d});
  const Tensor norm = num::Sqrt(num::Sum(num::Square(e)));
  const Tensor col_norms = num::Sqrt(num::MatMul(Tensor::Full({1, d}, 1.0), num::Square(proj)));
  const Tensor unit = num::Div(proj, num::RepeatRows(col_norms, d));
  const Tensor cosines = num::Div(num::MatMul(e, unit), norm);  // [1 x S]

  const Tensor cos_y = num::Slice(cosines, 1, label, label + 1);
  const Tensor blended = num::Scale(num::Add(num::Scale(cos_y, lambda), AngularPsi(cos_y, margin)),
                                    1.0 / (1.0 + lambda));
  std::vector<Tensor> parts;
  if (label > 0) parts.push_back(num::Slice(cosines, 1, 0, label));
  parts.push_back(blended);
  if (label + 1 < s) parts.push_back(num::Slice(cosines, 1, label + 1, s));
  const Tensor logits = num::Mul(num::Concat(std::span<const Tensor>(parts), 1), norm);
  return num::SoftmaxCrossEntropy(logits, label);
}

JointLoss CombineLosses(const TtsLoss& tts, const Tensor& l_spk, double weight) {
  if (!(weight >= 0.0)) throw ConfigError("speaker loss weight must be >= 0");
  JointLoss out;
  out.total = num::Add(num::Add(tts.l1, tts.l2), tts.stop_bce);
  out.values.l1 = tts.l1.item();
  out.values.l2 = tts.l2.item();
  out.values.stop_bce = tts.stop_bce.item();
  if (weight > 0.0) {
    if (l_spk.impl() == nullptr) throw UsageError("speaker loss weight > 0 needs a speaker loss");
    out.total = num::Add(out.total, num::Scale(l_spk, weight));
  }
  if (l_spk.impl() != nullptr) out.values.l_spk = l_spk.item();
  out.values.total = out.total.item();
  return out;
}

}  // namespace ttsspk::model
