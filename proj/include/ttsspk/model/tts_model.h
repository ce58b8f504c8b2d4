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

#ifndef TTSSPK_MODEL_TTS_MODEL_H_
#define TTSSPK_MODEL_TTS_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ttsspk/model/config.h"
#include "ttsspk/model/layers.h"
#include "ttsspk/numerics/ops.h"

namespace ttsspk::model {

struct AttentionOutput {
  num::Tensor context;  // [1 x (D + D_e)]
  num::Tensor weights;  // [1 x J]
};

struct DecoderState {
  num::LstmState lstm;
  num::Tensor prev_weights;  // [1 x J]
  num::Tensor prev_context;  // [1 x (D + D_e)]
};

// Keys computed once per utterance for attention: H_cat and W_h H_cat.
struct AttentionMemory {
  num::Tensor values;     // [J x (D + D_e)]
  num::Tensor processed;  // [J x attention_dim]
};

struct DecodeStepOutput {
  num::Tensor frames;      // [r x D_a]
  num::Tensor stop_logit;  // [1 x 1]
  DecoderState state;
  num::Tensor weights;     // [1 x J]
};

struct TeacherForcedOutput {
  num::Tensor pred;         // [T x D_a]
  num::Tensor stop_logits;  // [1 x ceil(T / r)]
  num::Tensor attention;    // [ceil(T / r) x J]
  num::Tensor embedding;    // [1 x D_e]
};

// Multi-speaker TTS with a jointly trained speaker encoder. All mel inputs
// and outputs here are in the model's normalized feature space.
class TtsModel {
 public:
  TtsModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  // ids [J] -> H [J x D]
  num::Tensor EncodeText(std::span<const std::size_t> ids) const;
  // mel [T x D_a] -> e [1 x D_e]; needs T >= 4.
  num::Tensor EncodeSpeaker(const num::Tensor& mel) const;

  AttentionMemory PrepareMemory(const num::Tensor& text, const num::Tensor& embedding) const;
  AttentionOutput Attend(const num::Tensor& query, const AttentionMemory& memory,
                         const num::Tensor& prev_weights) const;
  DecoderState InitialState(std::size_t num_tokens) const;
  // prev_frames [r x D_a] (or [1 x r*D_a]).
  DecodeStepOutput DecodeStep(const num::Tensor& prev_frames, const DecoderState& state,
                              const AttentionMemory& memory) const;

  // With `external_embedding` unset, e = EncodeSpeaker(target).
  TeacherForcedOutput ForwardTeacherForced(
      std::span<const std::size_t> ids, const num::Tensor& target,
      const std::optional<num::Tensor>& external_embedding = std::nullopt) const;

  // Autoregressive decoding without a tape. Returns [T x D_a].
  num::Tensor Synthesize(std::span<const std::size_t> ids, const num::Tensor& embedding,
                         std::size_t max_steps = 400, double stop_threshold = 0.5) const;

  // Per-dimension feature statistics ("norm/mean", "norm/std"), stored with
  // the parameters but never trained.
  void SetFeatureStats(std::span<const double> mean, std::span<const double> stddev);
  // raw [T x D_a] -> (raw - mean) / std, and back.
  num::Tensor Normalize(const num::Tensor& raw) const;
  num::Tensor Denormalize(const num::Tensor& normalized) const;

  bool has_classifier() const { return params_.Contains("spk/proj"); }

 private:
  num::Tensor Prenet(const num::Tensor& groups) const;
  num::Tensor ResidualBlock(const num::Tensor& x, const std::string& prefix) const;
  num::Tensor ConvBias(const num::Tensor& x, const std::string& prefix, std::size_t stride) const;
  const num::Tensor& P(const std::string& name) const { return params_.Get(name); }

  ModelConfig config_;
  ParameterStore params_;
};

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_TTS_MODEL_H_
