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

#include "ttsspk/features/manifest.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::feat {
namespace {

const std::set<std::string>& RecordKeys() {
  static const std::set<std::string> keys = {"utt_id", "speaker_id", "gender",
                                             "audio_source", "text_source", "subset"};
  return keys;
}

}  // namespace

std::string SubsetString(Subset s) { return s == Subset::kTrain ? "train" : "eval"; }

Subset ParseSubset(const std::string& s) {
  if (s == "train") return Subset::kTrain;
  if (s == "eval") return Subset::kEval;
  throw InputError("subset must be \"train\" or \"eval\", got \"" + s + "\"");
}

std::filesystem::path Manifest::Resolve(const std::string& relative) const {
  std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<UtteranceRecord> Manifest::Select(Subset subset) const {
  std::vector<UtteranceRecord> out;
  for (const auto& r : records) {
    if (r.subset == subset) out.push_back(r);
  }
  return out;
}

void Manifest::Validate() const {
  std::set<std::string> ids;
  std::map<std::string, std::string> gender_of;
  for (const auto& r : records) {
    if (!ids.insert(r.utt_id).second) throw InputError("duplicate utt_id " + r.utt_id);
    if (r.gender != "M" && r.gender != "F") {
      throw InputError(r.utt_id + ": gender must be \"M\" or \"F\"");
    }
    auto [it, inserted] = gender_of.emplace(r.speaker_id, r.gender);
    if (!inserted && it->second != r.gender) {
      throw InputError("speaker " + r.speaker_id + " has inconsistent gender");
    }
  }
}

nlohmann::json RecordToJson(const UtteranceRecord& r) {
  nlohmann::json j;
  j["utt_id"] = r.utt_id;
  j["speaker_id"] = r.speaker_id;
  j["gender"] = r.gender;
  j["audio_source"] = r.audio_source;
  j["text_source"] = r.text_source;
  j["subset"] = SubsetString(r.subset);
  return j;
}

UtteranceRecord RecordFromJson(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!RecordKeys().count(key)) throw InputError(where + ": unknown field \"" + key + "\"");
  }
  for (const auto& key : RecordKeys()) {
    if (!j.contains(key)) throw InputError(where + ": missing field \"" + key + "\"");
  }
  UtteranceRecord r;
  try {
    r.utt_id = j.at("utt_id").get<std::string>();
    r.speaker_id = j.at("speaker_id").get<std::string>();
    r.gender = j.at("gender").get<std::string>();
    r.audio_source = j.at("audio_source");
    r.text_source = j.at("text_source").get<std::string>();
    r.subset = ParseSubset(j.at("subset").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
  if (r.utt_id.empty()) throw InputError(where + ": empty utt_id");
  if (!r.audio_source.is_string() && !r.audio_source.is_object()) {
    throw InputError(where + ": audio_source must be a path or an object");
  }
  return r;
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
    m.records.push_back(RecordFromJson(j, where));
  }
  if (m.records.empty()) throw InputError("manifest " + path.string() + " has no records");
  m.Validate();
  return m;
}

void WriteManifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ostringstream os;
  for (const auto& r : manifest.records) os << RecordToJson(r).dump() << "\n";
  io::WriteFileAtomic(path, os.str());
}

}  // namespace ttsspk::feat
