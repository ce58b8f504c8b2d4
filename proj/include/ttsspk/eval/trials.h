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

#ifndef TTSSPK_EVAL_TRIALS_H_
#define TTSSPK_EVAL_TRIALS_H_

#include <filesystem>
#include <string>
#include <vector>

#include "ttsspk/backend/embeddings.h"
#include "ttsspk/backend/pipeline.h"
#include "ttsspk/features/manifest.h"

namespace ttsspk::eval {

struct Trial {
  std::string enroll;
  std::string test;
  bool is_target = false;

  bool operator==(const Trial&) const = default;
};

struct TrialUtterance {
  std::string utt_id;
  std::string speaker_id;
  std::string gender;
};

// Every unordered same-gender pair once, in input order (i < j). Throws
// InputError for a missing gender or speaker.
std::vector<Trial> MakeTrials(const std::vector<TrialUtterance>& utts);
std::vector<Trial> MakeTrials(const std::vector<feat::UtteranceRecord>& records);

std::size_t CountTargets(const std::vector<Trial>& trials);

// "<enroll> <test> <target|nontarget>" per line.
void WriteTrials(const std::filesystem::path& path, const std::vector<Trial>& trials);
std::vector<Trial> ReadTrials(const std::filesystem::path& path);

// Scores in trial order; a trial utterance without an embedding raises
// InputError naming it.
std::vector<double> ScoreTrials(const backend::BackendModel& model,
                                const backend::EmbeddingSet& embeddings,
                                const std::vector<Trial>& trials);

// "<enroll> <test> <score>" with six decimals.
void WriteScores(const std::filesystem::path& path, const std::vector<Trial>& trials,
                 const std::vector<double>& scores);

}  // namespace ttsspk::eval

#endif  // TTSSPK_EVAL_TRIALS_H_
