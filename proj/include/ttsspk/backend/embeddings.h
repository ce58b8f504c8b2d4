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

#ifndef TTSSPK_BACKEND_EMBEDDINGS_H_
#define TTSSPK_BACKEND_EMBEDDINGS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ttsspk::backend {

struct EmbeddingRecord {
  std::string utt_id;
  std::optional<std::string> speaker_id;
  std::string gender;
  Eigen::VectorXd vector;
};

struct EmbeddingSet {
  std::vector<EmbeddingRecord> records;

  std::size_t size() const { return records.size(); }
  Eigen::Index dim() const { return records.empty() ? 0 : records.front().vector.size(); }
  // Equal dimensions, unique non-empty utt_ids, finite values.
  void Validate() const;
  // Throws InputError naming `utt_id` when absent.
  const EmbeddingRecord& Find(const std::string& utt_id) const;
  // Dense integer labels in order of first appearance; throws InputError
  // when a record has no speaker_id.
  std::vector<int> SpeakerLabels() const;
};

// One JSON object per line: {utt_id, speaker_id|null, gender, vector}.
void WriteEmbeddings(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet ReadEmbeddings(const std::filesystem::path& path);

Eigen::VectorXd MeanVector(const EmbeddingSet& set);
// Subtracts `mean` and scales each vector to unit L2 norm. A vector that is
// zero after centering raises NumericError naming its utt_id.
EmbeddingSet CenterAndNormalize(const EmbeddingSet& set, const Eigen::VectorXd& mean);

}  // namespace ttsspk::backend

#endif  // TTSSPK_BACKEND_EMBEDDINGS_H_
