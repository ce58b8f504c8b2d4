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

#include "ttsspk/backend/embeddings.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::backend {

void EmbeddingSet::Validate() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (r.utt_id.empty()) throw InputError("embedding with empty utt_id");
    if (!seen.insert(r.utt_id).second) throw InputError("duplicate embedding utt_id " + r.utt_id);
    if (r.vector.size() != dim()) {
      throw DimensionError("embedding " + r.utt_id + " has dimension " +
                           std::to_string(r.vector.size()) + ", expected " +
                           std::to_string(dim()));
    }
    if (!r.vector.allFinite()) throw NumericError("non-finite embedding for " + r.utt_id);
  }
}

const EmbeddingRecord& EmbeddingSet::Find(const std::string& utt_id) const {
  for (const auto& r : records) {
    if (r.utt_id == utt_id) return r;
  }
  throw InputError("no embedding for utterance " + utt_id);
}

std::vector<int> EmbeddingSet::SpeakerLabels() const {
  std::map<std::string, int> ids;
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const auto& r : records) {
    if (!r.speaker_id) throw InputError("embedding " + r.utt_id + " has no speaker_id");
    auto it = ids.try_emplace(*r.speaker_id, static_cast<int>(ids.size())).first;
    labels.push_back(it->second);
  }
  return labels;
}

void WriteEmbeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  set.Validate();
  std::ostringstream os;
  for (const auto& r : set.records) {
    nlohmann::json j;
    j["utt_id"] = r.utt_id;
    j["speaker_id"] = r.speaker_id ? nlohmann::json(*r.speaker_id) : nlohmann::json(nullptr);
    j["gender"] = r.gender;
    j["vector"] = std::vector<double>(r.vector.data(), r.vector.data() + r.vector.size());
    os << j.dump() << '\n';
  }
  io::WriteFileAtomic(path, os.str());
}

EmbeddingSet ReadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  EmbeddingSet set;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(n);
    try {
      const auto j = nlohmann::json::parse(line);
      EmbeddingRecord r;
      r.utt_id = j.at("utt_id").get<std::string>();
      if (!j.at("speaker_id").is_null()) r.speaker_id = j.at("speaker_id").get<std::string>();
      r.gender = j.at("gender").get<std::string>();
      const auto v = j.at("vector").get<std::vector<double>>();
      r.vector = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      set.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  set.Validate();
  return set;
}

Eigen::VectorXd MeanVector(const EmbeddingSet& set) {
  if (set.records.empty()) throw InputError("mean of an empty embedding set");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(set.dim());
  for (const auto& r : set.records) m += r.vector;
  return m / static_cast<double>(set.size());
}

EmbeddingSet CenterAndNormalize(const EmbeddingSet& set, const Eigen::VectorXd& mean) {
  if (!set.records.empty() && mean.size() != set.dim()) {
    throw DimensionError("centering mean has dimension " + std::to_string(mean.size()) +
                         ", embeddings have " + std::to_string(set.dim()));
  }
  EmbeddingSet out = set;
  for (auto& r : out.records) {
    r.vector -= mean;
    const double n = r.vector.norm();
    if (!(n > 0.0)) throw NumericError("zero-norm embedding after centering: " + r.utt_id);
    r.vector /= n;
  }
  return out;
}

}  // namespace ttsspk::backend
