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

#ifndef TTSSPK_CLI_RUN_CONFIG_H_
#define TTSSPK_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "ttsspk/backend/pipeline.h"
#include "ttsspk/features/mel.h"
#include "ttsspk/model/config.h"
#include "ttsspk/text/tokens.h"

namespace ttsspk::cli {

struct TextConfig {
  text::TokenKind mode = text::TokenKind::kTranscript;
  text::TokenizationMode tokenization = text::TokenizationMode::kChar;
  // Alignments are read at frame_sr and upsampled to target_sr.
  int frame_sr = 3;
  int target_sr = 1;
  std::size_t align_tolerance = 2;
};

struct TrainConfig {
  int epochs = 10;
  std::size_t batch = 4;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  std::int64_t max_steps = 0;
  double clip_norm = 1.0;
};

struct PathsConfig {
  std::string manifest;
  std::string prepared;
};

struct RunConfig {
  feat::FeatureConfig features;
  TextConfig text;
  model::ModelConfig model;
  TrainConfig train;
  backend::BackendConfig backend;
  PathsConfig paths;

  void Validate() const;
};

nlohmann::json FeatureConfigToJson(const feat::FeatureConfig& c);
feat::FeatureConfig FeatureConfigFromJson(const nlohmann::json& j);

// Unknown keys anywhere raise ConfigError naming the dotted key.
nlohmann::json RunConfigToJson(const RunConfig& c);
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Overrides one numeric or string setting addressed as "section.key"; a
// bare key refers to the model section.
RunConfig WithSetting(const RunConfig& c, const std::string& param, const std::string& value);

}  // namespace ttsspk::cli

#endif  // TTSSPK_CLI_RUN_CONFIG_H_
