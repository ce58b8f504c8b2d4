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

#ifndef TTSSPK_MODEL_CONFIG_H_
#define TTSSPK_MODEL_CONFIG_H_

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace ttsspk::model {

struct ModelConfig {
  std::size_t vocab_size = 0;  // filled from the vocabulary at training time
  std::size_t text_dim = 64;   // D
  std::size_t text_conv_layers = 3;
  std::size_t text_conv_kernel = 5;
  std::size_t embedding_dim = 32;  // D_e
  std::size_t mel_dim = 40;        // D_a
  std::size_t decoder_hidden = 128;
  std::size_t prenet_units = 32;
  std::size_t attention_dim = 32;
  std::size_t location_filters = 4;
  std::size_t location_kernel = 15;
  std::vector<std::size_t> resnet_channels = {8, 16};
  std::size_t lde_components = 8;  // C
  std::size_t reduction_factor = 2;  // r
  double spk_loss_weight = 0.03;     // w
  int angular_margin = 2;            // m
  // Size of the speaker classification layer; 0 means none.
  std::size_t num_speakers = 0;

  // Throws ConfigError naming the offending field.
  void Validate() const;

  std::size_t memory_dim() const { return text_dim + embedding_dim; }
  // Frequency extent after the stride-2 downsample.
  std::size_t pooled_freq() const { return (mel_dim - 1) / 2 + 1; }
  std::size_t lde_input_dim() const { return resnet_channels[1] * pooled_freq(); }
};

nlohmann::json ModelConfigToJson(const ModelConfig& cfg);
// Rejects unknown keys; missing keys keep their defaults.
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_CONFIG_H_
