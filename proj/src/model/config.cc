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

#include "ttsspk/model/config.h"

#include <string>

#include "ttsspk/common/error.h"

namespace ttsspk::model {
namespace {

void RequirePositive(std::size_t v, const char* name) {
  if (v < 1) throw ConfigError(std::string("model.") + name + " must be >= 1");
}

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model.") + key + ": " + e.what());
  }
}

void Read(const nlohmann::json& j, const char* key, std::size_t& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) {
    throw ConfigError(std::string("model.") + key + " must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

void Read(const nlohmann::json& j, const char* key, std::vector<std::size_t>& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("model.") + key + " must be an array");
  out.clear();
  for (const auto& x : v) {
    if (!x.is_number_unsigned()) {
      throw ConfigError(std::string("model.") + key + " entries must be non-negative integers");
    }
    out.push_back(x.get<std::size_t>());
  }
}

}  // namespace

void ModelConfig::Validate() const {
  RequirePositive(text_dim, "text_dim");
  if (text_dim % 2 != 0) throw ConfigError("model.text_dim must be even (bidirectional halves)");
  RequirePositive(text_conv_layers, "text_conv_layers");
  RequirePositive(text_conv_kernel, "text_conv_kernel");
  if (text_conv_kernel % 2 == 0) throw ConfigError("model.text_conv_kernel must be odd");
  RequirePositive(embedding_dim, "embedding_dim");
  RequirePositive(mel_dim, "mel_dim");
  RequirePositive(decoder_hidden, "decoder_hidden");
  RequirePositive(prenet_units, "prenet_units");
  RequirePositive(attention_dim, "attention_dim");
  RequirePositive(location_filters, "location_filters");
  RequirePositive(location_kernel, "location_kernel");
  if (location_kernel % 2 == 0) throw ConfigError("model.location_kernel must be odd");
  if (resnet_channels.size() != 2) {
    throw ConfigError("model.resnet_channels must list exactly two channel counts");
  }
  RequirePositive(resnet_channels[0], "resnet_channels[0]");
  RequirePositive(resnet_channels[1], "resnet_channels[1]");
  RequirePositive(lde_components, "lde_components");
  RequirePositive(reduction_factor, "reduction_factor");
  if (!(spk_loss_weight >= 0.0)) throw ConfigError("model.spk_loss_weight must be >= 0");
  if (angular_margin < 1) throw ConfigError("model.angular_margin must be an integer >= 1");
}

nlohmann::json ModelConfigToJson(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"text_dim", c.text_dim},
          {"text_conv_layers", c.text_conv_layers},
          {"text_conv_kernel", c.text_conv_kernel},
          {"embedding_dim", c.embedding_dim},
          {"mel_dim", c.mel_dim},
          {"decoder_hidden", c.decoder_hidden},
          {"prenet_units", c.prenet_units},
          {"attention_dim", c.attention_dim},
          {"location_filters", c.location_filters},
          {"location_kernel", c.location_kernel},
          {"resnet_channels", c.resnet_channels},
          {"lde_components", c.lde_components},
          {"reduction_factor", c.reduction_factor},
          {"spk_loss_weight", c.spk_loss_weight},
          {"angular_margin", c.angular_margin},
          {"num_speakers", c.num_speakers}};
}

ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  const nlohmann::json known = ModelConfigToJson(ModelConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown model config key \"" + key + "\"");
  }
  ModelConfig c;
  Read(j, "vocab_size", c.vocab_size);
  Read(j, "text_dim", c.text_dim);
  Read(j, "text_conv_layers", c.text_conv_layers);
  Read(j, "text_conv_kernel", c.text_conv_kernel);
  Read(j, "embedding_dim", c.embedding_dim);
  Read(j, "mel_dim", c.mel_dim);
  Read(j, "decoder_hidden", c.decoder_hidden);
  Read(j, "prenet_units", c.prenet_units);
  Read(j, "attention_dim", c.attention_dim);
  Read(j, "location_filters", c.location_filters);
  Read(j, "location_kernel", c.location_kernel);
  Read(j, "resnet_channels", c.resnet_channels);
  Read(j, "lde_components", c.lde_components);
  Read(j, "reduction_factor", c.reduction_factor);
  Read(j, "spk_loss_weight", c.spk_loss_weight);
  if (j.contains("angular_margin") && !j.at("angular_margin").is_number_integer()) {
    throw ConfigError("model.angular_margin must be an integer");
  }
  Read(j, "angular_margin", c.angular_margin);
  Read(j, "num_speakers", c.num_speakers);
  c.Validate();
  return c;
}

}  // namespace ttsspk::model
