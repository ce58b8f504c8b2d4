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

#ifndef TTSSPK_NUMERICS_OPS_H_
#define TTSSPK_NUMERICS_OPS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ttsspk/numerics/tensor.h"

// Differentiable tensor ops. Every op validates shapes (DimensionError),
// rejects non-finite results (NumericError) and records a gradient rule on
// the current tape when any input requires grad.

namespace ttsspk::num {

// [m x k] * [k x n] -> [m x n]
Tensor MatMul(const Tensor& a, const Tensor& b);

// Cross-correlation (no kernel flip).
// input [C_in x H x W], kernels [C_out x C_in x kh x kw] -> [C_out x H' x W']
// with H' = (H + 2 * padding - kh) / stride + 1.
Tensor Conv2d(const Tensor& input, const Tensor& kernels, std::size_t stride,
              std::size_t padding);

// Time-major 1-D cross-correlation along axis 0.
// input [T x C_in], kernels [C_out x C_in x K] -> [T + 2 * padding - K + 1 x C_out]
Tensor Conv1d(const Tensor& input, const Tensor& kernels, std::size_t padding);

enum class UnaryOp { kTanh, kSigmoid, kRelu, kLog, kExp, kSquare, kAbs, kSqrt, kNeg };
enum class BinaryOp { kAdd, kSub, kMul, kDiv };

Tensor Unary(UnaryOp op, const Tensor& x);
// Operands must have identical shapes, or one of them must hold one element.
Tensor Binary(BinaryOp op, const Tensor& a, const Tensor& b);

// Name-based entry point: add, sub, mul, div take two operands; tanh,
// sigmoid, relu, log, exp, square, abs, sqrt, neg take one.
Tensor Elementwise(std::string_view op_name, std::span<const Tensor> operands);

inline Tensor Add(const Tensor& a, const Tensor& b) { return Binary(BinaryOp::kAdd, a, b); }
inline Tensor Sub(const Tensor& a, const Tensor& b) { return Binary(BinaryOp::kSub, a, b); }
inline Tensor Mul(const Tensor& a, const Tensor& b) { return Binary(BinaryOp::kMul, a, b); }
inline Tensor Div(const Tensor& a, const Tensor& b) { return Binary(BinaryOp::kDiv, a, b); }
inline Tensor Tanh(const Tensor& x) { return Unary(UnaryOp::kTanh, x); }
inline Tensor Sigmoid(const Tensor& x) { return Unary(UnaryOp::kSigmoid, x); }
inline Tensor Relu(const Tensor& x) { return Unary(UnaryOp::kRelu, x); }
inline Tensor Log(const Tensor& x) { return Unary(UnaryOp::kLog, x); }
inline Tensor Exp(const Tensor& x) { return Unary(UnaryOp::kExp, x); }
inline Tensor Square(const Tensor& x) { return Unary(UnaryOp::kSquare, x); }
// Subgradient 0 at 0.
inline Tensor Abs(const Tensor& x) { return Unary(UnaryOp::kAbs, x); }
// Gradient taken as 0 at 0.
inline Tensor Sqrt(const Tensor& x) { return Unary(UnaryOp::kSqrt, x); }

Tensor Scale(const Tensor& x, double factor);

// Numerically stable (max-subtracted) softmax along `axis`.
Tensor Softmax(const Tensor& x, std::size_t axis);

// All non-axis extents must agree.
Tensor Concat(std::span<const Tensor> tensors, std::size_t axis);
inline Tensor Concat(std::initializer_list<Tensor> tensors, std::size_t axis) {
  return Concat(std::span<const Tensor>(tensors.begin(), tensors.size()), axis);
}

// Half-open range [begin, end) along `axis`.
Tensor Slice(const Tensor& x, std::size_t axis, std::size_t begin,
             std::size_t end);
Tensor Reshape(const Tensor& x, Shape shape);
// [m x n] -> [n x m]
Tensor Transpose(const Tensor& x);
// [A x B x C] -> [B x A x C]
Tensor SwapLeadingAxes(const Tensor& x);

Tensor Sum(const Tensor& x);
Tensor Mean(const Tensor& x);

// x [m x n] plus a length-n row added to every row.
Tensor AddRowBroadcast(const Tensor& x, const Tensor& row);
// x [C x H x W] plus bias[c] added to every element of channel c.
Tensor AddChannelBias(const Tensor& x, const Tensor& bias);
// Length-n row tiled into [count x n].
Tensor RepeatRows(const Tensor& row, std::size_t count);
// Rows of `table` [V x D] selected by `ids` -> [J x D].
Tensor Gather(const Tensor& table, std::span<const std::size_t> ids);

// LSTM gate nonlinearities. gates [1 x 4H] laid out (input, forget, cell,
// output), c [1 x H]. Returns [1 x 2H] holding (h', c').
Tensor LstmPointwise(const Tensor& gates, const Tensor& c);

struct LstmParams {
  Tensor weight;  // [(input + hidden) x 4 * hidden]
  Tensor bias;    // [1 x 4 * hidden]
};

struct LstmState {
  Tensor h;  // [1 x hidden]
  Tensor c;  // [1 x hidden]
};

// One LSTM cell step on a [1 x input] row.
LstmState RecurrentStep(const Tensor& x, const LstmState& state,
                        const LstmParams& params);

// -log softmax(logits)[label] for a single row of logits.
Tensor SoftmaxCrossEntropy(const Tensor& logits, std::size_t label);

// Mean over elements of the binary cross entropy of sigmoid(logits) against
// `targets`, with positive examples weighted by `positive_weight`.
Tensor BceWithLogits(const Tensor& logits, std::span<const double> targets,
                     double positive_weight);

}  // namespace ttsspk::num

#endif  // TTSSPK_NUMERICS_OPS_H_
