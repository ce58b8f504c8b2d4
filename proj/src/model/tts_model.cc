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

#include "ttsspk/model/tts_model.h"

#include <algorithm>
#include <cmath>

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::model {

using num::Tensor;

namespace {

std::size_t Half(std::size_t d) { return d / 2; }

}  // namespace

TtsModel::TtsModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.Validate();
  if (config_.vocab_size < 3) {
    throw ConfigError("model.vocab_size must cover the reserved symbols plus at least one token");
  }
  std::mt19937_64 rng(seed);
  const ModelConfig& c = config_;
  const std::size_t d = c.text_dim, k = c.text_conv_kernel, hd = Half(d);
  auto zeros_row = [](std::size_t n) { return Tensor::Zeros({1, n}); };

  params_.Add("text/embedding", GlorotUniform({c.vocab_size, d}, c.vocab_size, d, rng));
  for (std::size_t i = 0; i < c.text_conv_layers; ++i) {
    const std::string p = "text/conv" + std::to_string(i);
    params_.Add(p + "/w", GlorotUniform({d, d, k}, d * k, d * k, rng));
    params_.Add(p + "/b", zeros_row(d));
  }
  for (const char* dir : {"fw", "bw"}) {
    const std::string p = std::string("text/lstm_") + dir;
    params_.Add(p + "/w", GlorotUniform({d + hd, 4 * hd}, d + hd, 4 * hd, rng));
    params_.Add(p + "/b", zeros_row(4 * hd));
  }

  const std::size_t c0 = c.resnet_channels[0], c1 = c.resnet_channels[1];
  auto conv = [&](const std::string& p, std::size_t co, std::size_t ci) {
    params_.Add(p + "/w", GlorotUniform({co, ci, 3, 3}, ci * 9, co * 9, rng));
    params_.Add(p + "/b", Tensor::Zeros({co}));
  };
  conv("spk/stem", c0, 1);
  conv("spk/block1/conv1", c0, c0);
  conv("spk/block1/conv2", c0, c0);
  conv("spk/down", c1, c0);
  conv("spk/block2/conv1", c1, c1);
  conv("spk/block2/conv2", c1, c1);
  const std::size_t df = c.lde_input_dim(), comps = c.lde_components;
  params_.Add("spk/lde/centers", GaussianInit({comps, df}, 1.0 / std::sqrt(static_cast<double>(df)), rng));
  params_.Add("spk/lde/log_scales", zeros_row(comps));
  params_.Add("spk/out/w", GlorotUniform({comps * df, c.embedding_dim}, comps * df, c.embedding_dim, rng));
  params_.Add("spk/out/b", zeros_row(c.embedding_dim));
  if (c.num_speakers > 0) {
    params_.Add("spk/proj", GlorotUniform({c.embedding_dim, c.num_speakers}, c.embedding_dim,
                                          c.num_speakers, rng));
  }

  const std::size_t group = c.reduction_factor * c.mel_dim, pn = c.prenet_units;
  const std::size_t h = c.decoder_hidden, a = c.attention_dim, mem = c.memory_dim();
  params_.Add("dec/prenet1/w", GlorotUniform({group, pn}, group, pn, rng));
  params_.Add("dec/prenet1/b", zeros_row(pn));
  params_.Add("dec/prenet2/w", GlorotUniform({pn, pn}, pn, pn, rng));
  params_.Add("dec/prenet2/b", zeros_row(pn));
  params_.Add("dec/lstm/w", GlorotUniform({pn + mem + h, 4 * h}, pn + mem + h, 4 * h, rng));
  params_.Add("dec/lstm/b", zeros_row(4 * h));
  params_.Add("att/query/w", GlorotUniform({h, a}, h, a, rng));
  params_.Add("att/query/b", zeros_row(a));
  params_.Add("att/memory/w", GlorotUniform({mem, a}, mem, a, rng));
  params_.Add("att/location/conv",
              GlorotUniform({c.location_filters, 1, c.location_kernel}, c.location_kernel,
                            c.location_filters * c.location_kernel, rng));
  params_.Add("att/location/w", GlorotUniform({c.location_filters, a}, c.location_filters, a, rng));
  params_.Add("att/v", GlorotUniform({a, 1}, a, 1, rng));
  params_.Add("dec/out/w", GlorotUniform({h + mem, group}, h + mem, group, rng));
  params_.Add("dec/out/b", zeros_row(group));
  params_.Add("dec/stop/w", GlorotUniform({h + mem, 1}, h + mem, 1, rng));
  params_.Add("dec/stop/b", zeros_row(1));
  params_.Add("norm/mean", zeros_row(c.mel_dim), false);
  params_.Add("norm/std", Tensor::Full({1, c.mel_dim}, 1.0), false);
}

void TtsModel::SetFeatureStats(std::span<const double> mean, std::span<const double> stddev) {
  if (mean.size() != config_.mel_dim || stddev.size() != config_.mel_dim) {
    throw DimensionError("feature statistics must have " + std::to_string(config_.mel_dim) +
                         " entries");
  }
  for (double s : stddev) {
    if (!(s > 0.0)) throw DomainError("feature standard deviations must be positive");
  }
  auto m = params_.Get("norm/mean").mutable_data();
  auto sd = params_.Get("norm/std").mutable_data();
  std::copy(mean.begin(), mean.end(), m.begin());
  std::copy(stddev.begin(), stddev.end(), sd.begin());
}

Tensor TtsModel::Normalize(const Tensor& raw) const {
  if (raw.rank() != 2 || raw.dim(1) != config_.mel_dim) {
    throw DimensionError("normalize: expected [T x " + std::to_string(config_.mel_dim) +
                         "], got " + num::ShapeString(raw.shape()));
  }
  const auto m = P("norm/mean").data();
  const auto sd = P("norm/std").data();
  std::vector<double> out(raw.data().begin(), raw.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t d = i % config_.mel_dim;
    out[i] = (out[i] - m[d]) / sd[d];
  }
  return Tensor(raw.shape(), std::move(out));
}

Tensor TtsModel::Denormalize(const Tensor& normalized) const {
  const auto m = P("norm/mean").data();
  const auto sd = P("norm/std").data();
  std::vector<double> out(normalized.data().begin(), normalized.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t d = i % config_.mel_dim;
    out[i] = out[i] * sd[d] + m[d];
  }
  return Tensor(normalized.shape(), std::move(out));
}

Tensor TtsModel::EncodeText(std::span<const std::size_t> ids) const {
  if (ids.empty()) throw InputError("encode_text: empty token sequence");
  for (std::size_t id : ids) {
    if (id >= config_.vocab_size) {
      throw InputError("encode_text: token id " + std::to_string(id) +
                       " >= vocabulary size " + std::to_string(config_.vocab_size));
    }
  }
  const std::size_t j_len = ids.size(), hd = Half(config_.text_dim);
  Tensor x = num::Gather(P("text/embedding"), ids);
  const std::size_t pad = (config_.text_conv_kernel - 1) / 2;
  for (std::size_t i = 0; i < config_.text_conv_layers; ++i) {
    const std::string p = "text/conv" + std::to_string(i);
    x = num::Tanh(num::AddRowBroadcast(num::Conv1d(x, P(p + "/w"), pad), P(p + "/b")));
  }
  std::vector<Tensor> rows;
  rows.reserve(j_len);
  for (std::size_t j = 0; j < j_len; ++j) rows.push_back(num::Slice(x, 0, j, j + 1));

  auto run = [&](const std::string& p, bool reverse) {
    const num::LstmParams lp{P(p + "/w"), P(p + "/b")};
    num::LstmState st{Tensor::Zeros({1, hd}), Tensor::Zeros({1, hd})};
    std::vector<Tensor> out(j_len);
    for (std::size_t n = 0; n < j_len; ++n) {
      const std::size_t j = reverse ? j_len - 1 - n : n;
      st = num::RecurrentStep(rows[j], st, lp);
      out[j] = st.h;
    }
    return out;
  };
  const std::vector<Tensor> fw = run("text/lstm_fw", false);
  const std::vector<Tensor> bw = run("text/lstm_bw", true);
  std::vector<Tensor> joined;
  joined.reserve(j_len);
  for (std::size_t j = 0; j < j_len; ++j) joined.push_back(num::Concat({fw[j], bw[j]}, 1));
  return num::Concat(std::span<const Tensor>(joined), 0);
}

Tensor TtsModel::ConvBias(const Tensor& x, const std::string& prefix, std::size_t stride) const {
  return num::AddChannelBias(num::Conv2d(x, P(prefix + "/w"), stride, 1), P(prefix + "/b"));
}

Tensor TtsModel::ResidualBlock(const Tensor& x, const std::string& prefix) const {
  Tensor y = num::Relu(ConvBias(x, prefix + "/conv1", 1));
  y = ConvBias(y, prefix + "/conv2", 1);
  return num::Relu(num::Add(x, y));
}

Tensor TtsModel::EncodeSpeaker(const Tensor& mel) const {
  if (mel.rank() != 2 || mel.dim(1) != config_.mel_dim) {
    throw DimensionError("encode_speaker: expected [T x " + std::to_string(config_.mel_dim) +
                         "] features, got " + num::ShapeString(mel.shape()));
  }
  if (mel.dim(0) < 4) {
    throw InputError("encode_speaker: need at least 4 frames, got " + std::to_string(mel.dim(0)));
  }
  Tensor x = num::Reshape(mel, {1, mel.dim(0), mel.dim(1)});
  x = num::Relu(ConvBias(x, "spk/stem", 1));
  x = ResidualBlock(x, "spk/block1");
  x = num::Relu(ConvBias(x, "spk/down", 2));
  x = ResidualBlock(x, "spk/block2");
  // [C x T' x F'] -> [T' x C*F']
  Tensor seq = num::SwapLeadingAxes(x);
  seq = num::Reshape(seq, {seq.dim(0), seq.dim(1) * seq.dim(2)});
  Tensor pooled = LdePool(seq, P("spk/lde/centers"), P("spk/lde/log_scales"));
  return num::AddRowBroadcast(num::MatMul(pooled, P("spk/out/w")), P("spk/out/b"));
}

AttentionMemory TtsModel::PrepareMemory(const Tensor& text, const Tensor& embedding) const {
  if (embedding.size() != config_.embedding_dim) {
    throw DimensionError("speaker embedding has " + std::to_string(embedding.size()) +
                         " values, expected " + std::to_string(config_.embedding_dim));
  }
  AttentionMemory m;
  m.values = num::Concat({text, num::RepeatRows(embedding, text.dim(0))}, 1);
  m.processed = num::MatMul(m.values, P("att/memory/w"));
  return m;
}

AttentionOutput TtsModel::Attend(const Tensor& query, const AttentionMemory& memory,
                                 const Tensor& prev_weights) const {
  const std::size_t j_len = memory.values.dim(0);
  const std::size_t pad = (config_.location_kernel - 1) / 2;
  Tensor loc = num::Conv1d(num::Reshape(prev_weights, {j_len, 1}), P("att/location/conv"), pad);
  Tensor keys = num::Add(memory.processed, num::MatMul(loc, P("att/location/w")));
  Tensor q = num::AddRowBroadcast(num::MatMul(query, P("att/query/w")), P("att/query/b"));
  Tensor energies = num::MatMul(num::Tanh(num::AddRowBroadcast(keys, q)), P("att/v"));
  AttentionOutput out;
  out.weights = num::Softmax(num::Reshape(energies, {1, j_len}), 1);
  out.context = num::MatMul(out.weights, memory.values);
  return out;
}

DecoderState TtsModel::InitialState(std::size_t num_tokens) const {
  DecoderState s;
  s.lstm = {Tensor::Zeros({1, config_.decoder_hidden}), Tensor::Zeros({1, config_.decoder_hidden})};
  std::vector<double> w(num_tokens, 0.0);
  w[0] = 1.0;
  s.prev_weights = Tensor({1, num_tokens}, std::move(w));
  s.prev_context = Tensor::Zeros({1, config_.memory_dim()});
  return s;
}

Tensor TtsModel::Prenet(const Tensor& groups) const {
  Tensor x = num::Relu(num::AddRowBroadcast(num::MatMul(groups, P("dec/prenet1/w")), P("dec/prenet1/b")));
  return num::Relu(num::AddRowBroadcast(num::MatMul(x, P("dec/prenet2/w")), P("dec/prenet2/b")));
}

DecodeStepOutput TtsModel::DecodeStep(const Tensor& prev_frames, const DecoderState& state,
                                      const AttentionMemory& memory) const {
  const std::size_t group = config_.reduction_factor * config_.mel_dim;
  if (prev_frames.size() != group) {
    throw DimensionError("decode_step: previous frames " + num::ShapeString(prev_frames.shape()) +
                         " do not hold r x D_a values");
  }
  Tensor pre = Prenet(num::Reshape(prev_frames, {1, group}));
  DecodeStepOutput out;
  out.state.lstm = num::RecurrentStep(num::Concat({pre, state.prev_context}, 1), state.lstm,
                                      {P("dec/lstm/w"), P("dec/lstm/b")});
  AttentionOutput att = Attend(out.state.lstm.h, memory, state.prev_weights);
  out.state.prev_weights = att.weights;
  out.state.prev_context = att.context;
  out.weights = att.weights;
  Tensor hc = num::Concat({out.state.lstm.h, att.context}, 1);
  out.frames = num::Reshape(num::AddRowBroadcast(num::MatMul(hc, P("dec/out/w")), P("dec/out/b")),
                            {config_.reduction_factor, config_.mel_dim});
  out.stop_logit = num::AddRowBroadcast(num::MatMul(hc, P("dec/stop/w")), P("dec/stop/b"));
  return out;
}

TeacherForcedOutput TtsModel::ForwardTeacherForced(
    std::span<const std::size_t> ids, const Tensor& target,
    const std::optional<Tensor>& external_embedding) const {
  const std::size_t r = config_.reduction_factor, da = config_.mel_dim;
  if (target.rank() != 2 || target.dim(1) != da) {
    throw DimensionError("teacher forcing: target must be [T x " + std::to_string(da) + "], got " +
                         num::ShapeString(target.shape()));
  }
  const std::size_t t_len = target.dim(0);
  const std::size_t steps = (t_len + r - 1) / r;

  TeacherForcedOutput out;
  out.embedding = external_embedding ? *external_embedding : EncodeSpeaker(target);
  const Tensor text = EncodeText(ids);
  const AttentionMemory memory = PrepareMemory(text, out.embedding);

  // Previous-group inputs: a zero go group, then the target shifted by one
  // group. r + T >= steps * r, so the tail group never needs padding here.
  Tensor shifted = num::Slice(num::Concat({Tensor::Zeros({r, da}), target}, 0), 0, 0, steps * r);
  Tensor pre_all = Prenet(num::Reshape(shifted, {steps, r * da}));

  DecoderState state = InitialState(ids.size());
  std::vector<Tensor> hcs, weights;
  hcs.reserve(steps);
  weights.reserve(steps);
  const num::LstmParams lstm{P("dec/lstm/w"), P("dec/lstm/b")};
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor pre = steps == 1 ? pre_all : num::Slice(pre_all, 0, t, t + 1);
    state.lstm = num::RecurrentStep(num::Concat({pre, state.prev_context}, 1), state.lstm, lstm);
    AttentionOutput att = Attend(state.lstm.h, memory, state.prev_weights);
    state.prev_weights = att.weights;
    state.prev_context = att.context;
    weights.push_back(att.weights);
    hcs.push_back(num::Concat({state.lstm.h, att.context}, 1));
  }
  Tensor hc = num::Concat(std::span<const Tensor>(hcs), 0);
  Tensor frames = num::AddRowBroadcast(num::MatMul(hc, P("dec/out/w")), P("dec/out/b"));
  frames = num::Reshape(frames, {steps * r, da});
  out.pred = steps * r == t_len ? frames : num::Slice(frames, 0, 0, t_len);
  Tensor stop = num::AddRowBroadcast(num::MatMul(hc, P("dec/stop/w")), P("dec/stop/b"));
  out.stop_logits = num::Reshape(stop, {1, steps});
  out.attention = num::Concat(std::span<const Tensor>(weights), 0);
  return out;
}

Tensor TtsModel::Synthesize(std::span<const std::size_t> ids, const Tensor& embedding,
                            std::size_t max_steps, double stop_threshold) const {
  if (max_steps < 1) throw ConfigError("synthesize: max_steps must be >= 1");
  num::NoGradScope no_grad;
  const Tensor text = EncodeText(ids);
  const AttentionMemory memory = PrepareMemory(text, embedding);
  DecoderState state = InitialState(ids.size());
  Tensor prev = Tensor::Zeros({config_.reduction_factor, config_.mel_dim});
  std::vector<Tensor> frames;
  for (std::size_t t = 0; t < max_steps; ++t) {
    DecodeStepOutput step = DecodeStep(prev, state, memory);
    frames.push_back(step.frames);
    state = step.state;
    prev = step.frames;
    const double p_stop = 1.0 / (1.0 + std::exp(-step.stop_logit.item()));
    if (p_stop > stop_threshold) break;
  }
  return num::Concat(std::span<const Tensor>(frames), 0);
}

}  // namespace ttsspk::model
