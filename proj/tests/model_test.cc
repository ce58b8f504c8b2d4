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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.h"
#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"
#include "ttsspk/model/checkpoint.h"
#include "ttsspk/model/config.h"
#include "ttsspk/model/layers.h"
#include "ttsspk/model/losses.h"
#include "ttsspk/model/trainer.h"
#include "ttsspk/model/tts_model.h"
#include "ttsspk/numerics/ops.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::model {
namespace {

using num::Tensor;
using testing::CheckGradients;
using testing::RandomTensor;
using testing::TempDir;

// J=3, T=6, D=4, D_e=3, D_a=5, C=2, r=2.
ModelConfig MicroConfig() {
  ModelConfig c;
  c.vocab_size = 5;
  c.text_dim = 4;
  c.text_conv_layers = 1;
  c.text_conv_kernel = 3;
  c.embedding_dim = 3;
  c.mel_dim = 5;
  c.decoder_hidden = 4;
  c.prenet_units = 3;
  c.attention_dim = 3;
  c.location_filters = 2;
  c.location_kernel = 3;
  c.resnet_channels = {2, 2};
  c.lde_components = 2;
  c.reduction_factor = 2;
  c.spk_loss_weight = 0.5;
  c.angular_margin = 2;
  c.num_speakers = 3;
  return c;
}

ModelConfig SmallConfig() {
  ModelConfig c;
  c.vocab_size = 8;
  c.text_dim = 8;
  c.embedding_dim = 4;
  c.mel_dim = 10;
  c.decoder_hidden = 12;
  c.prenet_units = 8;
  c.attention_dim = 6;
  c.resnet_channels = {2, 3};
  c.lde_components = 3;
  c.num_speakers = 0;
  c.spk_loss_weight = 0.0;
  return c;
}

Tensor RandomMel(std::size_t t, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return RandomTensor({t, d}, rng, 1.0, false);
}

TEST(Micro, JointLossGradientsMatchFiniteDifferences) {
  TtsModel m(MicroConfig(), 3);
  // Zero biases put ReLU inputs exactly on the kink for the zero go frame.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01(0.0, 0.3);
  for (auto& p : m.params().Trainable()) {
    if (p.name.ends_with("/b")) {
      for (double& v : p.value.mutable_data()) v += n01(rng);
    }
  }
  const std::vector<std::size_t> ids = {2, 4, 1};
  const Tensor target = RandomMel(6, 5, 9);
  auto loss = [&] {
    TeacherForcedOutput fw = m.ForwardTeacherForced(ids, target);
    TtsLoss tts = ComputeTtsLoss(fw.pred, target, fw.stop_logits);
    Tensor spk = AngularSoftmaxLoss(fw.embedding, m.params().Get("spk/proj"), 1, 2, 5.0);
    return CombineLosses(tts, spk, 0.5).total;
  };
  auto r = CheckGradients(loss, m.params().Trainable());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_GT(r.checked, 100u);
}

TEST(EncodeText, ShapeAndDeterminism) {
  TtsModel m(SmallConfig(), 1);
  for (std::size_t j : {1u, 7u, 40u}) {
    std::vector<std::size_t> ids(j);
    for (std::size_t i = 0; i < j; ++i) ids[i] = 2 + i % 6;
    Tensor h = m.EncodeText(ids);
    EXPECT_EQ(h.shape(), (num::Shape{j, 8}));
    Tensor h2 = m.EncodeText(ids);
    EXPECT_TRUE(std::equal(h.data().begin(), h.data().end(), h2.data().begin()));
  }
  const std::vector<std::size_t> bad = {2, 9};
  EXPECT_THROW(m.EncodeText(bad), InputError);
}

TEST(EncodeText, EmbeddingGradientMatchesFiniteDifferences) {
  TtsModel m(MicroConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 2, 4};
  auto loss = [&] { return num::Slice(num::Reshape(m.EncodeText(ids), {1, 16}), 1, 5, 6); };
  auto r = CheckGradients([&] { return num::Sum(loss()); },
                          {{"text/embedding", m.params().Get("text/embedding")}});
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(EncodeSpeaker, FixedOutputSizeAndShortInputError) {
  TtsModel m(SmallConfig(), 2);
  for (std::size_t t : {8u, 50u, 300u}) {
    Tensor e = m.EncodeSpeaker(RandomMel(t, 10, t));
    EXPECT_EQ(e.shape(), (num::Shape{1, 4}));
  }
  EXPECT_THROW(m.EncodeSpeaker(RandomMel(3, 10, 1)), InputError);
  EXPECT_THROW(m.EncodeSpeaker(RandomMel(8, 9, 1)), DimensionError);
}

TEST(EncodeSpeaker, GradientsMatchFiniteDifferences) {
  TtsModel m(MicroConfig(), 8);
  const Tensor mel = RandomMel(7, 5, 4);
  std::vector<num::NamedParameter> ps;
  for (auto& p : m.params().Trainable()) {
    if (p.name.rfind("spk/", 0) == 0 && p.name != "spk/proj") ps.push_back(p);
  }
  auto r = CheckGradients([&] { return num::Sum(num::Square(m.EncodeSpeaker(mel))); }, ps);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(LdePool, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor x = RandomTensor({std::size_t(4 + trial), 3}, rng);
    Tensor mu = RandomTensor({std::size_t(2 + trial % 2), 3}, rng);
    Tensor sig = RandomTensor({1, std::size_t(2 + trial % 2)}, rng, 0.5);
    Tensor probe = RandomTensor({1, std::size_t((2 + trial % 2) * 3)}, rng, 1.0, false);
    auto r = CheckGradients([&] { return num::Sum(num::Mul(LdePool(x, mu, sig), probe)); },
                            {{"x", x}, {"mu", mu}, {"sigma", sig}});
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  }
}

TEST(LdePool, FrameAtCenterHasZeroResidual) {
  Tensor mu = Tensor::Matrix(2, 3, {1, 2, 3, -4, 0, 2});
  Tensor x = Tensor::Matrix(1, 3, {1, 2, 3});
  Tensor out = LdePool(x, mu, Tensor::Zeros({1, 2}));
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(out[k], 0.0, 1e-12);
}

TEST(LdePool, PermutationInvariant) {
  std::mt19937_64 rng(7);
  Tensor x = RandomTensor({6, 4}, rng, 1.0, false);
  Tensor mu = RandomTensor({3, 4}, rng, 1.0, false);
  Tensor sig = RandomTensor({1, 3}, rng, 1.0, false);
  Tensor ref = LdePool(x, mu, sig);
  std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
  Tensor xp = num::Gather(x, perm);
  Tensor out = LdePool(xp, mu, sig);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out[i], ref[i], 1e-12);
}

TEST(LdePool, SingleComponentIsMeanResidual) {
  std::mt19937_64 rng(8);
  Tensor x = RandomTensor({5, 3}, rng, 1.0, false);
  Tensor mu = RandomTensor({1, 3}, rng, 1.0, false);
  Tensor out = LdePool(x, mu, Tensor::Full({1, 1}, 0.7));
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (std::size_t t = 0; t < 5; ++t) mean += x[t * 3 + k] / 5.0;
    // Total weight is 5, so the 1e-8 guard perturbs the result by ~2e-9.
    EXPECT_NEAR(out[k], (mean - mu[k]) * 5.0 / (5.0 + 1e-8), 1e-14);
  }
}

TEST(Attention, WeightsFormADistribution) {
  TtsModel m(SmallConfig(), 4);
  std::mt19937_64 rng(1);
  const std::vector<std::size_t> ids = {2, 3, 4, 5, 6};
  AttentionMemory mem = m.PrepareMemory(m.EncodeText(ids), RandomTensor({1, 4}, rng, 1.0, false));
  for (int trial = 0; trial < 20; ++trial) {
    Tensor prev = num::Softmax(RandomTensor({1, 5}, rng, 3.0, false), 1);
    AttentionOutput a = m.Attend(RandomTensor({1, 12}, rng, 2.0, false), mem, prev);
    double s = 0.0;
    for (double w : a.weights.data()) {
      EXPECT_GE(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Attention, SingleTokenAttendsFully) {
  TtsModel m(SmallConfig(), 4);
  std::mt19937_64 rng(1);
  const std::vector<std::size_t> ids = {3};
  AttentionMemory mem = m.PrepareMemory(m.EncodeText(ids), RandomTensor({1, 4}, rng, 1.0, false));
  AttentionOutput a = m.Attend(RandomTensor({1, 12}, rng), mem, Tensor::Full({1, 1}, 1.0));
  EXPECT_DOUBLE_EQ(a.weights.item(), 1.0);
  for (std::size_t i = 0; i < mem.values.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.context[i], mem.values[i]);
  }
}

// With the location projection zeroed, scores reduce to plain additive
// attention, evaluated here element by element.
TEST(Attention, ZeroLocationWeightsMatchContentAttention) {
  TtsModel m(SmallConfig(), 6);
  for (double& v : m.params().Get("att/location/w").mutable_data()) v = 0.0;
  std::mt19937_64 rng(3);
  const std::vector<std::size_t> ids = {2, 5, 7, 3};
  const Tensor e = RandomTensor({1, 4}, rng, 1.0, false);
  AttentionMemory mem = m.PrepareMemory(m.EncodeText(ids), e);
  const Tensor query = RandomTensor({1, 12}, rng, 1.0, false);
  AttentionOutput a = m.Attend(query, mem, Tensor::Full({1, 4}, 0.25));

  const auto& wq = m.params().Get("att/query/w");
  const auto& bq = m.params().Get("att/query/b");
  const auto& wm = m.params().Get("att/memory/w");
  const auto& v = m.params().Get("att/v");
  const std::size_t j_len = 4, mem_dim = 12, att = 6;
  std::vector<double> energy(j_len);
  for (std::size_t j = 0; j < j_len; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < att; ++k) {
      double pre = bq[k];
      for (std::size_t i = 0; i < 12; ++i) pre += query[i] * wq[i * att + k];
      for (std::size_t i = 0; i < mem_dim; ++i) pre += mem.values[j * mem_dim + i] * wm[i * att + k];
      s += v[k] * std::tanh(pre);
    }
    energy[j] = s;
  }
  const double mx = *std::max_element(energy.begin(), energy.end());
  double z = 0.0;
  for (double& en : energy) z += (en = std::exp(en - mx));
  for (std::size_t j = 0; j < j_len; ++j) EXPECT_NEAR(a.weights[j], energy[j] / z, 1e-12);
  for (std::size_t i = 0; i < mem_dim; ++i) {
    double c = 0.0;
    for (std::size_t j = 0; j < j_len; ++j) c += energy[j] / z * mem.values[j * mem_dim + i];
    EXPECT_NEAR(a.context[i], c, 1e-12);
  }
}

TEST(TeacherForcing, ShapesAndStepCount) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 4, 1};
  for (std::size_t t : {8u, 9u}) {
    TeacherForcedOutput out = m.ForwardTeacherForced(ids, RandomMel(t, 10, t));
    EXPECT_EQ(out.pred.shape(), (num::Shape{t, 10}));
    EXPECT_EQ(out.stop_logits.size(), (t + 1) / 2);
    EXPECT_EQ(out.attention.shape(), (num::Shape{(t + 1) / 2, 4}));
    for (std::size_t s = 0; s < out.attention.dim(0); ++s) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 4; ++j) sum += out.attention[s * 4 + j];
      EXPECT_NEAR(sum, 1.0, 1e-6);
    }
  }
}

// The batched teacher-forced pass equals stepping DecodeStep on the
// ground-truth groups.
TEST(TeacherForcing, MatchesStepwiseDecoding) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 4, 1};
  const Tensor target = RandomMel(7, 10, 2);
  TeacherForcedOutput tf = m.ForwardTeacherForced(ids, target);
  AttentionMemory mem = m.PrepareMemory(m.EncodeText(ids), tf.embedding);
  DecoderState st = m.InitialState(ids.size());
  Tensor prev = Tensor::Zeros({2, 10});
  for (std::size_t s = 0; s < 4; ++s) {
    DecodeStepOutput out = m.DecodeStep(prev, st, mem);
    for (std::size_t i = 0; i < 20 && s * 20 + i < 70; ++i) {
      EXPECT_NEAR(out.frames[i], tf.pred[s * 20 + i], 1e-12);
    }
    EXPECT_NEAR(out.stop_logit.item(), tf.stop_logits[s], 1e-12);
    st = out.state;
    if (s < 3) prev = num::Slice(target, 0, 2 * s, 2 * s + 2);
  }
}

TEST(TeacherForcing, ExternalEmbeddingSkipsEncoder) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3};
  Tensor e = Tensor::Matrix(1, 4, {0.1, -0.2, 0.3, 0.4});
  TeacherForcedOutput out = m.ForwardTeacherForced(ids, RandomMel(6, 10, 1), e);
  EXPECT_EQ(out.embedding.impl(), e.impl());
}

TEST(TeacherForcing, JointModeTrainsSpeakerEncoder) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 4};
  const Tensor target = RandomMel(8, 10, 3);
  num::Tape tape;
  num::TapeScope scope(tape);
  TeacherForcedOutput fw = m.ForwardTeacherForced(ids, target);
  TtsLoss l = ComputeTtsLoss(fw.pred, target, fw.stop_logits);
  tape.Backward(CombineLosses(l, Tensor(), 0.0).total);
  double norm = 0.0;
  for (double g : m.params().Get("spk/out/w").grad()) norm += g * g;
  EXPECT_GT(norm, 0.0);
}

TEST(TeacherForcing, FramePredictionIgnoresStopHead) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 4};
  const Tensor target = RandomMel(8, 10, 3);
  Tensor before = m.ForwardTeacherForced(ids, target).pred.Clone();
  for (double& v : m.params().Get("dec/stop/w").mutable_data()) v += 1.0;
  for (double& v : m.params().Get("dec/stop/b").mutable_data()) v -= 2.0;
  Tensor after = m.ForwardTeacherForced(ids, target).pred;
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i], after[i]);
}

TEST(Synthesize, BoundedAndSpeakerConditioned) {
  TtsModel m(SmallConfig(), 5);
  const std::vector<std::size_t> ids = {2, 3, 4};
  Tensor e1 = Tensor::Matrix(1, 4, {1, 0, 0, 0});
  Tensor e2 = Tensor::Matrix(1, 4, {0, 0, 1, 0});
  // A large negative stop bias forces decoding to the step bound.
  m.params().Get("dec/stop/b").mutable_data()[0] = -50.0;
  Tensor a = m.Synthesize(ids, e1, 7);
  Tensor b = m.Synthesize(ids, e2, 7);
  EXPECT_EQ(a.dim(0), 14u);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_GT(diff, 0.0);
  m.params().Get("dec/stop/b").mutable_data()[0] = 50.0;
  EXPECT_EQ(m.Synthesize(ids, e1, 7).dim(0), 2u);
}

TEST(TtsLoss, Examples) {
  Tensor target = RandomMel(4, 3, 1);
  Tensor stop = Tensor::Matrix(1, 2, {-1, 1});
  TtsLoss same = ComputeTtsLoss(target, target, stop);
  EXPECT_EQ(same.l1.item(), 0.0);
  EXPECT_EQ(same.l2.item(), 0.0);
  Tensor shifted = num::Add(target, Tensor::Scalar(1.0));
  TtsLoss off = ComputeTtsLoss(shifted, target, stop);
  EXPECT_NEAR(off.l1.item(), 1.0, 1e-12);
  EXPECT_NEAR(off.l2.item(), 1.0, 1e-12);
  TtsLoss sat = ComputeTtsLoss(target, target, Tensor::Matrix(1, 3, {-60, -60, 60}));
  EXPECT_LT(sat.stop_bce.item(), 1e-20);
  // Mean of weighted BCE by hand: steps (-1 -> 0) and (1 -> 1, weight 5).
  const double expected = 0.5 * (std::log1p(std::exp(-1.0)) + 5.0 * std::log1p(std::exp(-1.0)));
  EXPECT_NEAR(same.stop_bce.item(), expected, 1e-12);
  EXPECT_THROW(ComputeTtsLoss(RandomMel(3, 3, 1), target, stop), DimensionError);
}

TEST(SpeakerLoss, MarginOneIsPlainSoftmax) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor e = RandomTensor({1, 5}, rng, 1.0, false);
    Tensor w = RandomTensor({5, 4}, rng, 1.0, false);
    const std::size_t label = trial % 4;
    const double loss = AngularSoftmaxLoss(e, w, label, 1, 7.0).item();
    double norm = 0.0;
    for (double v : e.data()) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<double> logits(4);
    for (std::size_t j = 0; j < 4; ++j) {
      double dot = 0.0, cn = 0.0;
      for (std::size_t i = 0; i < 5; ++i) {
        dot += e[i] * w[i * 4 + j];
        cn += w[i * 4 + j] * w[i * 4 + j];
      }
      logits[j] = dot / std::sqrt(cn);
    }
    double z = 0.0;
    for (double l : logits) z += std::exp(l);
    EXPECT_NEAR(loss, std::log(z) - logits[label], 1e-12);
    (void)norm;
  }
}

TEST(SpeakerLoss, SingleClassIsZero) {
  Tensor e = Tensor::Matrix(1, 3, {0.3, -1, 2});
  Tensor w = Tensor::Matrix(3, 1, {1, 2, 3});
  EXPECT_NEAR(AngularSoftmaxLoss(e, w, 0, 2, 5.0).item(), 0.0, 1e-15);
  EXPECT_THROW(AngularSoftmaxLoss(e, w, 1, 2, 5.0), DimensionError);
}

TEST(SpeakerLoss, AlignedEmbeddingMatchesMarginOne) {
  Tensor w = Tensor::Matrix(2, 3, {2, 0, 1, 0, 1, 1});
  Tensor e = Tensor::Matrix(1, 2, {3, 0});  // parallel to class 0's column
  EXPECT_DOUBLE_EQ(AngularPsi(1.0, 2), 1.0);
  EXPECT_NEAR(AngularSoftmaxLoss(e, w, 0, 2, 5.0).item(),
              AngularSoftmaxLoss(e, w, 0, 1, 5.0).item(), 1e-12);
}

TEST(SpeakerLoss, PsiPiecewiseDefinition) {
  for (double theta = 0.01; theta < std::numbers::pi; theta += 0.05) {
    const double c = std::cos(theta);
    for (int m : {1, 2, 3, 4}) {
      const int k = static_cast<int>(std::floor(m * theta / std::numbers::pi));
      const double expected = (k % 2 == 0 ? 1.0 : -1.0) * std::cos(m * theta) - 2.0 * k;
      EXPECT_NEAR(AngularPsi(c, m), expected, 1e-9) << theta << " " << m;
    }
  }
}

TEST(SpeakerLoss, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int m : {1, 2, 3}) {
    Tensor e = RandomTensor({1, 4}, rng);
    Tensor w = RandomTensor({4, 3}, rng);
    auto r = CheckGradients([&] { return AngularSoftmaxLoss(e, w, 2, m, 3.0); },
                            {{"e", e}, {"w", w}});
    EXPECT_LT(r.max_rel_error, 1e-4) << "m=" << m << " " << r.worst;
  }
}

TEST(SpeakerLoss, LambdaAnnealing) {
  EXPECT_DOUBLE_EQ(AnnealedLambda(0), 1000.0);
  EXPECT_DOUBLE_EQ(AnnealedLambda(10), 500.0);
  EXPECT_DOUBLE_EQ(AnnealedLambda(1000000), 5.0);
}

TEST(JointLoss, WeightSemantics) {
  TtsLoss parts{Tensor::Scalar(0.5, true), Tensor::Scalar(0.25, true), Tensor::Scalar(0.125, true)};
  Tensor spk = Tensor::Scalar(2.0, true);
  EXPECT_EQ(CombineLosses(parts, spk, 0.0).values.total, 0.875);
  EXPECT_NEAR(CombineLosses(parts, spk, 0.03).values.total - 0.875, 0.03 * 2.0, 1e-15);
  Tensor zero = Tensor::Scalar(0.0, true);
  EXPECT_EQ(CombineLosses(parts, zero, 0.3).values.total, CombineLosses(parts, zero, 3.0).values.total);
  EXPECT_THROW(CombineLosses(parts, spk, -1.0), ConfigError);
}

TEST(JointLoss, ZeroWeightLeavesProjectionWithoutGradient) {
  ModelConfig c = MicroConfig();
  c.spk_loss_weight = 0.0;
  TtsModel m(c, 1);
  const std::vector<std::size_t> ids = {2, 3, 4};
  const Tensor target = RandomMel(6, 5, 1);
  num::Tape tape;
  num::TapeScope scope(tape);
  TeacherForcedOutput fw = m.ForwardTeacherForced(ids, target);
  Tensor spk = AngularSoftmaxLoss(fw.embedding, m.params().Get("spk/proj"), 0, 2, 5.0);
  tape.Backward(CombineLosses(ComputeTtsLoss(fw.pred, target, fw.stop_logits), spk, 0.0).total);
  const Tensor& proj = m.params().Get("spk/proj");
  if (proj.has_grad()) {
    for (double g : proj.grad()) EXPECT_EQ(g, 0.0);
  }
}

TEST(ModelConfig, JsonRoundTripAndStrictKeys) {
  ModelConfig c = MicroConfig();
  ModelConfig back = ModelConfigFromJson(ModelConfigToJson(c));
  EXPECT_EQ(ModelConfigToJson(back), ModelConfigToJson(c));
  EXPECT_THROW(ModelConfigFromJson({{"bogus", 1}}), ConfigError);
  EXPECT_THROW(ModelConfigFromJson({{"reduction_factor", 0}}), ConfigError);
  EXPECT_THROW(ModelConfigFromJson({{"spk_loss_weight", -0.1}}), ConfigError);
  EXPECT_THROW(ModelConfigFromJson({{"angular_margin", 1.5}}), ConfigError);
  EXPECT_THROW(ModelConfigFromJson({{"text_dim", -4}}), ConfigError);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  TempDir dir("ckpt");
  TtsModel m(MicroConfig(), 11);
  const std::vector<double> mean = {1, 2, 3, 4, 5}, sd = {1, 1, 2, 2, 3};
  m.SetFeatureStats(mean, sd);
  num::AdamState adam = num::AdamState::For(m.params().Trainable(), {});
  adam.step_count = 17;
  adam.first_moment[0][0] = 0.5;
  nlohmann::json meta = {{"vocab", {"<pad>", "<eos>", "a"}}, {"train_state", {{"step", 17}}}};
  SaveCheckpoint(dir.path() / "m.ckpt", m, meta, &adam);
  Checkpoint ck = LoadCheckpoint(dir.path() / "m.ckpt");
  EXPECT_EQ(ModelConfigToJson(ck.model->config()), ModelConfigToJson(m.config()));
  EXPECT_EQ(ck.metadata, meta);
  for (const auto& p : m.params().All()) {
    const auto& q = ck.model->params().Get(p.name);
    EXPECT_TRUE(std::equal(p.value.data().begin(), p.value.data().end(), q.data().begin())) << p.name;
  }
  ASSERT_TRUE(ck.adam.has_value());
  EXPECT_EQ(ck.adam->step_count, 17);
  EXPECT_EQ(ck.adam->first_moment[0][0], 0.5);
  EXPECT_EQ(CheckpointId(dir.path() / "m.ckpt"), CheckpointId(dir.path() / "m.ckpt"));

  std::string bytes = io::ReadTextFile(dir.path() / "m.ckpt");
  io::WriteFileAtomic(dir.path() / "trunc.ckpt", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(LoadCheckpoint(dir.path() / "trunc.ckpt"), InputError);
  EXPECT_THROW(LoadCheckpoint(dir.path() / "nothing.ckpt"), InputError);
}

std::vector<TrainingExample> ToyData(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrainingExample> data;
  for (std::size_t i = 0; i < n; ++i) {
    TrainingExample ex;
    ex.utt_id = "u" + std::to_string(i);
    ex.ids = {2 + i % 3, 3 + i % 4, 1};
    ex.mel = RandomTensor({6 + i % 5, dim}, rng, 1.0, false);
    ex.speaker = i % 2;
    data.push_back(std::move(ex));
  }
  return data;
}

TEST(Trainer, DeterministicAndResumable) {
  TempDir dir("train");
  ModelConfig c = SmallConfig();
  c.num_speakers = 2;
  c.spk_loss_weight = 0.03;
  auto run = [&](const std::filesystem::path& out, int epochs) {
    TtsModel m(c, 7);
    TrainOptions o;
    o.epochs = epochs;
    o.batch_size = 2;
    o.seed = 3;
    o.out_dir = out;
    Trainer t(m, ToyData(5, 10, 1), o);
    return t.Run();
  };
  auto full = run(dir.path() / "full", 3);
  ASSERT_EQ(full.size(), 9u);
  auto again = run(dir.path() / "again", 3);
  for (std::size_t i = 0; i < full.size(); ++i) EXPECT_EQ(full[i].loss.total, again[i].loss.total);

  // One epoch, then resume from its checkpoint for the remaining two.
  run(dir.path() / "part", 1);
  Checkpoint ck = LoadCheckpoint(dir.path() / "part" / "last.ckpt");
  TrainOptions o;
  o.epochs = 3;
  o.batch_size = 2;
  o.seed = 3;
  o.out_dir = dir.path() / "part";
  Trainer t(*ck.model, ToyData(5, 10, 1), o);
  t.Resume(*ck.adam, TrainStateFromJson(ck.metadata.at("train_state")));
  auto rest = t.Run();
  ASSERT_EQ(rest.size(), 6u);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    EXPECT_EQ(rest[i].step, full[i + 3].step);
    EXPECT_NEAR(rest[i].loss.total, full[i + 3].loss.total, 1e-9);
  }
  std::ifstream log(dir.path() / "part" / "loss.jsonl");
  int lines = 0;
  for (std::string l; std::getline(log, l);) ++lines;
  EXPECT_EQ(lines, 9);
}

TEST(Trainer, ZeroWeightNeverTouchesProjection) {
  ModelConfig c = SmallConfig();
  c.num_speakers = 2;
  c.spk_loss_weight = 0.0;
  TtsModel m(c, 7);
  const std::vector<double> init(m.params().Get("spk/proj").data().begin(),
                                 m.params().Get("spk/proj").data().end());
  TrainOptions o;
  o.epochs = 2;
  o.batch_size = 2;
  Trainer t(m, ToyData(4, 10, 2), o);
  t.Run();
  const auto now = m.params().Get("spk/proj").data();
  EXPECT_TRUE(std::equal(init.begin(), init.end(), now.begin()));
}

TEST(Trainer, MaxStepsAndLossDecrease) {
  ModelConfig c = SmallConfig();
  TtsModel m(c, 7);
  TrainOptions o;
  o.epochs = 1000;
  o.batch_size = 2;
  o.max_steps = 60;
  o.learning_rate = 3e-3;
  Trainer t(m, ToyData(4, 10, 3), o);
  auto log = t.Run();
  ASSERT_EQ(log.size(), 60u);
  EXPECT_LT(log.back().loss.total, log.front().loss.total);
}

TEST(Trainer, NonFiniteLossAborts) {
  ModelConfig c = SmallConfig();
  TtsModel m(c, 7);
  auto data = ToyData(2, 10, 4);
  TrainOptions o;
  o.epochs = 1;
  Trainer t(m, data, o);
  m.params().Get("dec/out/w").mutable_data()[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(t.Run(), NumericError);
}

}  // namespace
}  // namespace ttsspk::model
