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

#ifndef TTSSPK_FEATURES_MANIFEST_H_
#define TTSSPK_FEATURES_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace ttsspk::feat {

enum class Subset { kTrain, kEval };

std::string SubsetString(Subset s);
Subset ParseSubset(const std::string& s);

struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string gender;  // "M" or "F"
  // Either a string path (relative to the manifest directory) or an object
  // of synthetic parameters.
  nlohmann::json audio_source;
  std::string text_source;
  Subset subset = Subset::kTrain;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  // Directory relative paths are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& relative) const;
  std::vector<UtteranceRecord> Select(Subset subset) const;
  // Throws InputError on duplicate utt_ids, bad gender, or a speaker whose
  // gender differs between records.
  void Validate() const;
};

nlohmann::json RecordToJson(const UtteranceRecord& r);
// `where` prefixes error messages (e.g. "manifest.jsonl:3").
UtteranceRecord RecordFromJson(const nlohmann::json& j, const std::string& where);

Manifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace ttsspk::feat

#endif  // TTSSPK_FEATURES_MANIFEST_H_
