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

#include "test_support.h"
#include "ttsspk/common/error.h"
#include "ttsspk/numerics/adam.h"
#include "ttsspk/numerics/kernels.h"
#include "ttsspk/numerics/ops.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::num {
namespace {

using testing::CheckGradients;
using testing::RandomTensor;

void ExpectData(const Tensor& t, const std::vector<double>& expected,
                double tol = 1e-12) {
  ASSERT_EQ(t.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(t[i], expected[i], tol) << "index " << i;
  }
}

TEST(MatMul, IdentityLeavesMatrixUnchanged) {
  Tensor eye = Tensor::Matrix(2, 2, {1, 0, 0, 1});
  Tensor m = Tensor::Matrix(2, 2, {1, 2, 3, 4});
  ExpectData(MatMul(eye, m), {1, 2, 3, 4});
}

TEST(MatMul, RowTimesColumn) {
  Tensor y = MatMul(Tensor::Matrix(1, 2, {1, 2}), Tensor::Matrix(2, 1, {3, 4}));
  EXPECT_EQ(y.shape(), (Shape{1, 1}));
  EXPECT_DOUBLE_EQ(y.item(), 11.0);
}

TEST(MatMul, ZeroAnnihilates) {
  std::mt19937_64 rng(1);
  Tensor y = MatMul(Tensor::Zeros({2, 3}), RandomTensor({3, 4}, rng, 1.0, false));
  EXPECT_EQ(y.shape(), (Shape{2, 4}));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(MatMul, ShapeMismatchNamesBothShapes) {
  try {
    MatMul(Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("[2x3] x [2x3]"), std::string::npos);
  }
}

TEST(Conv2d, UnitKernelIsIdentity) {
  Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor k({1, 1, 1, 1}, {1});
  Tensor y = Conv2d(x, k, 1, 0);
  EXPECT_EQ(y.shape(), (Shape{1, 3, 3}));
  ExpectData(y, {1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST(Conv2d, AllOnesKernelSums) {
  Tensor y = Conv2d(Tensor({1, 2, 2}, {1, 2, 3, 4}), Tensor::Full({1, 1, 2, 2}, 1.0), 1, 0);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 1}));
  EXPECT_DOUBLE_EQ(y.item(), 10.0);
}

TEST(Conv2d, ZeroKernelsGiveZeros) {
  std::mt19937_64 rng(2);
  Tensor y = Conv2d(RandomTensor({2, 5, 4}, rng, 1.0, false), Tensor::Zeros({3, 2, 3, 3}), 2, 1);
  EXPECT_EQ(y.shape(), (Shape{3, 3, 2}));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(Conv2d, OutputExtentFormulaAndNoFlip) {
  // Asymmetric kernel picks the top-left neighbour: no flip.
  Tensor x({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor k({1, 1, 2, 2}, {1, 0, 0, 0});
  Tensor y = Conv2d(x, k, 1, 0);
  ExpectData(y, {1, 2, 4, 5});
  EXPECT_EQ(Conv2d(Tensor::Zeros({1, 7, 6}), Tensor::Zeros({1, 1, 3, 3}), 2, 1).shape(),
            (Shape{1, 4, 3}));
}

TEST(Conv2d, KernelLargerThanPaddedInputIsDimensionError) {
  EXPECT_THROW(Conv2d(Tensor::Zeros({1, 2, 2}), Tensor::Zeros({1, 1, 3, 3}), 1, 0),
               DimensionError);
}

TEST(Elementwise, Examples) {
  EXPECT_DOUBLE_EQ(Sigmoid(Tensor::Scalar(0.0)).item(), 0.5);
  ExpectData(Relu(Tensor::Row({-3.0, 3.0})), {0.0, 3.0});
  const Tensor two = Tensor::Scalar(2.0);
  const Tensor a = Tensor::Row({1.0, 2.0});
  ExpectData(Elementwise("mul", std::vector<Tensor>{a, two}), {2.0, 4.0});
  EXPECT_THROW(Log(Tensor::Row({1.0, 0.0})), DomainError);
  EXPECT_THROW(Add(Tensor::Row({1.0, 2.0}), Tensor::Row({1.0, 2.0, 3.0})), DimensionError);
  EXPECT_THROW(Elementwise("cosh", std::vector<Tensor>{a}), UsageError);
}

TEST(Elementwise, AbsGradientMatchesFiniteDifference) {
  for (double x0 : {2.0, -2.0}) {
    Tensor x = Tensor::Scalar(x0, true);
    Tape tape;
    {
      TapeScope scope(tape);
      tape.Backward(Abs(x));
    }
    const double eps = 1e-5;
    const double numeric = (std::abs(x0 + eps) - std::abs(x0 - eps)) / (2 * eps);
    EXPECT_NEAR(x.grad()[0], numeric, 1e-9);
    EXPECT_DOUBLE_EQ(x.grad()[0], x0 > 0 ? 1.0 : -1.0);
  }
  Tensor zero = Tensor::Scalar(0.0, true);
  Tape tape;
  {
    TapeScope scope(tape);
    tape.Backward(Abs(zero));
  }
  EXPECT_EQ(zero.grad()[0], 0.0);
}

TEST(Softmax, Examples) {
  ExpectData(Softmax(Tensor::Row({0, 0, 0}), 1), {1.0 / 3, 1.0 / 3, 1.0 / 3});
  ExpectData(Softmax(Tensor::Row({1000, 0}), 1), {1.0, 0.0}, 1e-12);
  const double e1 = std::exp(1.0), e2 = std::exp(2.0);
  ExpectData(Softmax(Tensor::Row({1, 2}), 1), {e1 / (e1 + e2), e2 / (e1 + e2)});
  EXPECT_NEAR(Softmax(Tensor::Row({1, 2}), 1)[0], 0.2689, 1e-4);
  EXPECT_THROW(Softmax(Tensor::Row({1, 2}), 2), DimensionError);
}

TEST(Softmax, SumsToOneForLargeMagnitudes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = RandomTensor({3, 4, 5}, rng, 1e3, false);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      Tensor y = Softmax(x, axis);
      const Shape& s = y.shape();
      for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_GT(y[i], -1e-300);
        EXPECT_LE(y[i], 1.0);
      }
      // Sum along axis at each remaining index.
      std::size_t outer = 1, inner = 1;
      for (std::size_t k = 0; k < axis; ++k) outer *= s[k];
      for (std::size_t k = axis + 1; k < 3; ++k) inner *= s[k];
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
          double sum = 0;
          for (std::size_t k = 0; k < s[axis]; ++k) sum += y[(o * s[axis] + k) * inner + in];
          EXPECT_NEAR(sum, 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(Concat, Examples) {
  Tensor h = Tensor::Zeros({4, 3});
  Tensor e = Tensor::Zeros({4, 2});
  EXPECT_EQ(Concat({h, e}, 1).shape(), (Shape{4, 5}));
  Tensor x = Tensor::Matrix(2, 2, {1, 2, 3, 4});
  ExpectData(Concat({x}, 0), {1, 2, 3, 4});
  ExpectData(Concat({Tensor::Matrix(2, 1, {1, 2}), Tensor::Matrix(2, 1, {3, 4})}, 1),
             {1, 3, 2, 4});
  EXPECT_THROW(Concat({Tensor::Zeros({2, 1}), Tensor::Zeros({3, 1})}, 1), DimensionError);
}

TEST(RecurrentStep, ZeroEverythingGivesZeroState) {
  LstmParams p{Tensor::Zeros({5, 12}), Tensor::Zeros({1, 12})};
  LstmState s{Tensor::Zeros({1, 3}), Tensor::Zeros({1, 3})};
  LstmState out = RecurrentStep(Tensor::Zeros({1, 2}), s, p);
  for (double v : out.h.data()) EXPECT_EQ(v, 0.0);
  for (double v : out.c.data()) EXPECT_EQ(v, 0.0);
}

TEST(RecurrentStep, OneDimensionalCellMatchesHandEvaluation) {
  // Weight rows: x then h; columns: input, forget, cell, output gate.
  const double x = 0.5, h = -0.3, c = 0.2;
  const std::vector<double> wx = {0.1, -0.2, 0.3, 0.4};
  const std::vector<double> wh = {0.5, 0.6, -0.7, 0.8};
  const std::vector<double> b = {0.01, 0.02, 0.03, 0.04};
  std::vector<double> w(wx);
  w.insert(w.end(), wh.begin(), wh.end());
  LstmParams p{Tensor::Matrix(2, 4, w), Tensor::Row(b)};
  LstmState out = RecurrentStep(Tensor::Row({x}), {Tensor::Row({h}), Tensor::Row({c})}, p);
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  const double ig = sig(x * wx[0] + h * wh[0] + b[0]);
  const double fg = sig(x * wx[1] + h * wh[1] + b[1]);
  const double gg = std::tanh(x * wx[2] + h * wh[2] + b[2]);
  const double og = sig(x * wx[3] + h * wh[3] + b[3]);
  const double c_new = fg * c + ig * gg;
  EXPECT_NEAR(out.c.item(), c_new, 1e-15);
  EXPECT_NEAR(out.h.item(), og * std::tanh(c_new), 1e-15);
}

TEST(RecurrentStep, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  Tensor x = RandomTensor({1, 3}, rng);
  Tensor h = RandomTensor({1, 2}, rng);
  Tensor c = RandomTensor({1, 2}, rng);
  Tensor w = RandomTensor({5, 8}, rng);
  Tensor b = RandomTensor({1, 8}, rng);
  Tensor probe_h = RandomTensor({1, 2}, rng, 1.0, false);
  Tensor probe_c = RandomTensor({1, 2}, rng, 1.0, false);
  auto loss = [&] {
    LstmState s = RecurrentStep(x, {h, c}, {w, b});
    return Add(Sum(Mul(s.h, probe_h)), Sum(Mul(s.c, probe_c)));
  };
  auto r = CheckGradients(loss, {{"x", x}, {"h", h}, {"c", c}, {"w", w}, {"b", b}});
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_THROW(RecurrentStep(Tensor::Zeros({1, 2}), {Tensor::Zeros({1, 2}), Tensor::Zeros({1, 2})},
                             {w, b}),
               DimensionError);
}

TEST(Backward, Examples) {
  Tensor x = Tensor::Row({1, 2, 3}, true);
  Tape tape;
  {
    TapeScope scope(tape);
    tape.Backward(Sum(x));
  }
  ExpectData(Tensor::Row(std::vector<double>(x.grad().begin(), x.grad().end())), {1, 1, 1});

  Tensor a = Tensor::Scalar(2.0, true), b = Tensor::Scalar(3.0, true);
  Tape tape2;
  {
    TapeScope scope(tape2);
    tape2.Backward(Mul(a, b));
  }
  EXPECT_DOUBLE_EQ(a.grad()[0], 3.0);
  EXPECT_DOUBLE_EQ(b.grad()[0], 2.0);
}

TEST(Backward, NonScalarLossIsUsageError) {
  Tensor x = Tensor::Row({1, 2}, true);
  Tape tape;
  TapeScope scope(tape);
  Tensor y = Tanh(x);
  EXPECT_THROW(tape.Backward(y), UsageError);
}

TEST(Backward, FanOutAccumulates) {
  Tensor x = Tensor::Row({0.3, -0.7}, true);
  Tape tape;
  {
    TapeScope scope(tape);
    Tensor y = Add(Sum(Tanh(x)), Sum(Square(x)));
    tape.Backward(y);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const double t = std::tanh(x[i]);
    EXPECT_NEAR(x.grad()[i], (1 - t * t) + 2 * x[i], 1e-14);
  }
}

TEST(Backward, EachNodeVisitedOnce) {
  Tensor x = Tensor::Row({0.5}, true);
  Tape tape;
  TapeScope scope(tape);
  Tensor y = Sum(Mul(x, x));
  EXPECT_EQ(tape.size(), 2u);
  tape.Backward(y);
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
}

// Gradient check over every differentiable op on random small inputs.
TEST(GradientCheck, EveryOpOnRandomSmallInputs) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> ext(1, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = ext(rng), n = ext(rng), k = ext(rng);
    Tensor a = RandomTensor({m, k}, rng);
    Tensor b = RandomTensor({k, n}, rng);
    Tensor sq = RandomTensor({m, n}, rng);
    Tensor pos = RandomTensor({m, n}, rng);
    for (double& v : pos.mutable_data()) v = std::abs(v) + 0.5;
    Tensor row = RandomTensor({1, n}, rng);
    Tensor probe = RandomTensor({m, n}, rng, 1.0, false);
    const std::size_t h = ext(rng) + 2, w = ext(rng) + 2, ci = ext(rng), co = ext(rng);
    Tensor img = RandomTensor({ci, h, w}, rng);
    Tensor ker = RandomTensor({co, ci, 3, 2}, rng);
    Tensor seq = RandomTensor({h, ci}, rng);
    Tensor ker1 = RandomTensor({co, ci, 3}, rng);
    Tensor table = RandomTensor({4, n}, rng);
    Tensor cbias = RandomTensor({co}, rng);
    const std::vector<std::size_t> ids = {3, 0, 3};
    const std::vector<double> bce_targets = [&] {
      std::vector<double> t(n, 0.0);
      t.back() = 1.0;
      return t;
    }();

    auto loss = [&] {
      Tensor mm = MatMul(a, b);
      Tensor el = Add(Mul(Tanh(mm), Sigmoid(sq)), Sub(Exp(Scale(sq, 0.3)), Log(pos)));
      el = Add(el, Div(Abs(sq), pos));
      el = Add(el, Sqrt(pos));
      el = AddRowBroadcast(Add(el, Square(Relu(sq))), row);
      Tensor sm0 = Softmax(el, 0), sm1 = Softmax(el, 1);
      Tensor cat = Concat({sm0, sm1, mm}, 1);
      Tensor sl = Slice(Transpose(cat), 0, 1, cat.dim(1));
      Tensor conv = Conv2d(img, ker, 1 + trial % 2, trial % 2);
      Tensor conv3 = SwapLeadingAxes(AddChannelBias(conv, cbias));
      Tensor conv1 = Conv1d(seq, ker1, 1);
      Tensor g = Gather(table, ids);
      Tensor rep = RepeatRows(Reshape(row, {n}), 2);
      Tensor bce = BceWithLogits(Reshape(row, {n}), bce_targets, 5.0);
      Tensor ce = SoftmaxCrossEntropy(Reshape(row, {n}), n - 1);
      Tensor total = Add(Sum(Mul(el, probe)), Mean(Square(sl)));
      total = Add(total, Add(Sum(Tanh(conv3)), Mean(Square(conv1))));
      total = Add(total, Add(Sum(Square(g)), Sum(Mul(rep, rep))));
      return Add(total, Add(bce, ce));
    };
    auto r = CheckGradients(loss, {{"a", a}, {"b", b}, {"sq", sq}, {"pos", pos},
                                   {"row", row}, {"img", img}, {"ker", ker},
                                   {"seq", seq}, {"ker1", ker1}, {"table", table},
                                   {"cbias", cbias}});
    EXPECT_LT(r.max_rel_error, 1e-4) << "trial " << trial << ": " << r.worst;
  }
}

TEST(Determinism, IdenticalInputsGiveBitIdenticalOutputs) {
  auto run = [] {
    std::mt19937_64 rng(42);
    Tensor x = RandomTensor({6, 7}, rng);
    Tensor w = RandomTensor({7, 5}, rng);
    Tensor img = RandomTensor({2, 9, 8}, rng);
    Tensor ker = RandomTensor({3, 2, 3, 3}, rng);
    Tape tape;
    TapeScope scope(tape);
    Tensor loss = Add(Sum(Softmax(MatMul(x, w), 1)), Sum(Tanh(Conv2d(img, ker, 2, 1))));
    tape.Backward(loss);
    std::vector<double> out = {loss.item()};
    out.insert(out.end(), w.grad().begin(), w.grad().end());
    out.insert(out.end(), ker.grad().begin(), ker.grad().end());
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Finite, NonFiniteResultIsNumericError) {
  EXPECT_THROW(Exp(Tensor::Scalar(1000.0)), NumericError);
  EXPECT_THROW(Tensor::Row({1.0, std::nan("")}), NumericError);
}

TEST(Adam, ZeroGradientLeavesParametersAndDecaysMoments) {
  std::vector<NamedParameter> params = {{"p", Tensor::Row({1.0, -2.0}, true)}};
  AdamState state = AdamState::For(params, AdamHyper{});
  state.first_moment[0] = {0.5, 0.5};
  state.second_moment[0] = {0.25, 0.25};
  params[0].value.mutable_grad();
  // Moments are non-zero so the update itself is not zero; start from zero
  // moments to check that parameters stay put.
  AdamState fresh = AdamState::For(params, AdamHyper{});
  AdamStep(params, fresh);
  EXPECT_EQ(params[0].value[0], 1.0);
  EXPECT_EQ(params[0].value[1], -2.0);
  AdamStep(params, state);
  EXPECT_NEAR(state.first_moment[0][0], 0.45, 1e-15);
  EXPECT_NEAR(state.second_moment[0][0], 0.25 * 0.999, 1e-15);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<NamedParameter> params = {{"p", Tensor::Scalar(3.0, true)}};
  params[0].value.mutable_grad()[0] = 1.0;
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  AdamState state = AdamState::For(params, hyper);
  AdamStep(params, state);
  // m_hat = 1, v_hat = 1 after bias correction.
  EXPECT_NEAR(params[0].value.item(), 3.0 - 0.1 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(state.step_count, 1);
}

TEST(Adam, IdenticalGradientsGiveIdenticalUpdates) {
  std::vector<NamedParameter> params = {{"a", Tensor::Scalar(0.5, true)},
                                        {"b", Tensor::Scalar(0.5, true)}};
  AdamState state = AdamState::For(params, AdamHyper{});
  for (int i = 0; i < 3; ++i) {
    params[0].value.mutable_grad()[0] = 0.3 * (i + 1);
    params[1].value.mutable_grad()[0] = 0.3 * (i + 1);
    AdamStep(params, state);
  }
  EXPECT_EQ(params[0].value.item(), params[1].value.item());
}

TEST(Adam, NanGradientNamesParameter) {
  std::vector<NamedParameter> params = {{"decoder.weight", Tensor::Scalar(0.5, true)}};
  params[0].value.mutable_grad()[0] = std::nan("");
  AdamState state = AdamState::For(params, AdamHyper{});
  try {
    AdamStep(params, state);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("decoder.weight"), std::string::npos);
  }
  EXPECT_EQ(params[0].value.item(), 0.5);
}

TEST(Adam, ClipGradientNorm) {
  std::vector<NamedParameter> params = {{"a", Tensor::Row({0, 0}, true)}};
  params[0].value.mutable_grad()[0] = 3.0;
  params[0].value.mutable_grad()[1] = 4.0;
  EXPECT_DOUBLE_EQ(ClipGradientNorm(params, 1.0), 5.0);
  EXPECT_NEAR(params[0].value.grad()[0], 0.6, 1e-15);
  EXPECT_NEAR(params[0].value.grad()[1], 0.8, 1e-15);
}

}  // namespace
}  // namespace ttsspk::num
