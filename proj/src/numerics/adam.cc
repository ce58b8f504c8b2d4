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

#include "ttsspk/numerics/adam.h"

#include <cmath>

#include "ttsspk/common/error.h"

namespace ttsspk::num {

AdamState AdamState::For(std::span<const NamedParameter> params,
                         AdamHyper hyper) {
  AdamState s;
  s.hyper = hyper;
  for (const NamedParameter& p : params) {
    s.first_moment.emplace_back(p.value.size(), 0.0);
    s.second_moment.emplace_back(p.value.size(), 0.0);
  }
  return s;
}

void AdamStep(std::span<NamedParameter> params, AdamState& state) {
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw DimensionError("adam: state tracks " +
                         std::to_string(state.first_moment.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& p = params[i].value;
    if (state.first_moment[i].size() != p.size() ||
        state.second_moment[i].size() != p.size()) {
      throw DimensionError("adam: moment size mismatch for " + params[i].name);
    }
    for (double g : p.grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam: non-finite gradient in parameter " +
                           params[i].name);
      }
    }
  }
  ++state.step_count;
  const AdamHyper& h = state.hyper;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i].value;
    const auto grad = p.grad();
    auto data = p.mutable_data();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double g = grad.empty() ? 0.0 : grad[k];
      m[k] = h.beta1 * m[k] + (1.0 - h.beta1) * g;
      v[k] = h.beta2 * v[k] + (1.0 - h.beta2) * g * g;
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      data[k] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

double GradientNorm(std::span<const NamedParameter> params) {
  double sq = 0.0;
  for (const NamedParameter& p : params) {
    for (double g : p.value.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double ClipGradientNorm(std::span<NamedParameter> params, double max_norm) {
  const double norm =
      GradientNorm(std::span<const NamedParameter>(params.data(), params.size()));
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (NamedParameter& p : params) {
      if (!p.value.has_grad()) continue;
      for (double& g : p.value.mutable_grad()) g *= scale;
    }
  }
  return norm;
}

void ZeroGradients(std::span<NamedParameter> params) {
  for (NamedParameter& p : params) p.value.ZeroGrad();
}

}  // namespace ttsspk::num
