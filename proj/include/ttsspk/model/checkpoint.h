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

#ifndef TTSSPK_MODEL_CHECKPOINT_H_
#define TTSSPK_MODEL_CHECKPOINT_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttsspk/model/tts_model.h"
#include "ttsspk/numerics/adam.h"

namespace ttsspk::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout (little-endian):
//   "TTSE" | u32 version | u64 header length | header JSON |
//   u64 section count | sections
// where each section is u32 name length | name | u32 rank | u64 dims... |
// f64 data. The header JSON holds {"config": ModelConfig, ...metadata}.
// Optimizer moments, when present, are stored as "adam/m/<param>" and
// "adam/v/<param>" sections.
struct Checkpoint {
  std::unique_ptr<TtsModel> model;
  nlohmann::json metadata;  // header minus "config"
  std::optional<num::AdamState> adam;
};

void SaveCheckpoint(const std::filesystem::path& path, const TtsModel& model,
                    const nlohmann::json& metadata, const num::AdamState* adam = nullptr);

// Throws InputError for missing, truncated or inconsistent files.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// FNV-1a of the file bytes, hex encoded.
std::string CheckpointId(const std::filesystem::path& path);

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_CHECKPOINT_H_
