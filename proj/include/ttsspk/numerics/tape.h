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

#ifndef TTSSPK_NUMERICS_TAPE_H_
#define TTSSPK_NUMERICS_TAPE_H_

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "ttsspk/numerics/tensor.h"

namespace ttsspk::num {

// Records differentiable operations in execution order. Because a node can
// only be recorded after its inputs exist, the node list is topologically
// sorted by construction and Backward() is a single reverse sweep.
class Tape {
 public:
  // Receives the output (with its accumulated gradient) and pushes
  // contributions into the gradient buffers of the op's inputs.
  using BackwardFn = std::function<void(const TensorImpl& output)>;

  struct Node {
    std::string_view op;
    std::vector<std::shared_ptr<TensorImpl>> inputs;
    std::shared_ptr<TensorImpl> output;
    BackwardFn backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void Record(std::string_view op,
              std::vector<std::shared_ptr<TensorImpl>> inputs,
              std::shared_ptr<TensorImpl> output, BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and runs every node once, newest first.
  // Gradients accumulate additively, including into leaves, so several
  // backward passes can be summed before an optimizer step.
  void Backward(const Tensor& loss);

  void Clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

// The tape ops record onto on the calling thread, or nullptr (inference).
Tape* CurrentTape();

// Makes `tape` current for the lifetime of the scope.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

// Suspends recording, e.g. for embedding extraction.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  Tape* previous_;
};

void Backward(const Tensor& loss, Tape& tape);

// Helpers for implementing ops, including model-specific fused ops.
namespace detail {

// True when a tape is active and at least one input requires grad.
bool ShouldRecord(std::initializer_list<const Tensor*> inputs);
bool ShouldRecord(const std::vector<Tensor>& inputs);

// Throws NumericError naming `op` if any value is NaN or infinite.
void CheckFinite(std::string_view op, std::span<const double> values);

// Wraps freshly computed data into a tensor after the finiteness check.
Tensor MakeResult(std::string_view op, Shape shape, std::vector<double> data);

// Marks `output` as requiring grad and records it on the current tape.
void Attach(std::string_view op, const Tensor& output,
            std::vector<std::shared_ptr<TensorImpl>> inputs,
            Tape::BackwardFn backward);

}  // namespace detail

}  // namespace ttsspk::num

#endif  // TTSSPK_NUMERICS_TAPE_H_
