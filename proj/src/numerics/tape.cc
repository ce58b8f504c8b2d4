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

#include "ttsspk/numerics/tape.h"

#include <cmath>
#include <string>

#include "ttsspk/common/error.h"

namespace ttsspk::num {
namespace {

thread_local Tape* current_tape = nullptr;

}  // namespace

void Tape::Record(std::string_view op,
                  std::vector<std::shared_ptr<TensorImpl>> inputs,
                  std::shared_ptr<TensorImpl> output, BackwardFn backward) {
  nodes_.push_back(
      Node{op, std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::Backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw UsageError("backward needs a scalar loss, got shape " +
                     (loss.defined() ? ShapeString(loss.shape())
                                     : std::string("<undefined>")));
  }
  TensorImpl* root = loss.impl();
  if (!root->requires_grad) {
    throw UsageError("backward on a loss that does not depend on any "
                     "parameter");
  }
  root->EnsureGrad();
  root->grad[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    const TensorImpl& out = *it->output;
    if (out.grad.empty()) continue;
    it->backward(out);
  }
}

Tape* CurrentTape() { return current_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(current_tape) {
  current_tape = &tape;
}

TapeScope::~TapeScope() { current_tape = previous_; }

NoGradScope::NoGradScope() : previous_(current_tape) { current_tape = nullptr; }

NoGradScope::~NoGradScope() { current_tape = previous_; }

void Backward(const Tensor& loss, Tape& tape) { tape.Backward(loss); }

namespace detail {

bool ShouldRecord(std::initializer_list<const Tensor*> inputs) {
  if (current_tape == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

bool ShouldRecord(const std::vector<Tensor>& inputs) {
  if (current_tape == nullptr) return false;
  for (const Tensor& t : inputs) {
    if (t.requires_grad()) return true;
  }
  return false;
}

void CheckFinite(std::string_view op, std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite value in " + std::string(op));
    }
  }
}

Tensor MakeResult(std::string_view op, Shape shape, std::vector<double> data) {
  CheckFinite(op, data);
  return Tensor(std::move(shape), std::move(data));
}

void Attach(std::string_view op, const Tensor& output,
            std::vector<std::shared_ptr<TensorImpl>> inputs,
            Tape::BackwardFn backward) {
  output.impl()->requires_grad = true;
  current_tape->Record(op, std::move(inputs), output.shared(),
                       std::move(backward));
}

}  // namespace detail
}  // namespace ttsspk::num
