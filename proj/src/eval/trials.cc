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

#include "ttsspk/eval/trials.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::eval {

std::vector<Trial> MakeTrials(const std::vector<TrialUtterance>& utts) {
  for (const auto& u : utts) {
    if (u.gender.empty()) throw InputError("utterance " + u.utt_id + " has no gender");
    if (u.speaker_id.empty()) throw InputError("utterance " + u.utt_id + " has no speaker_id");
  }
  std::vector<Trial> trials;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    for (std::size_t j = i + 1; j < utts.size(); ++j) {
      if (utts[i].gender != utts[j].gender) continue;
      trials.push_back({utts[i].utt_id, utts[j].utt_id, utts[i].speaker_id == utts[j].speaker_id});
    }
  }
  return trials;
}

std::vector<Trial> MakeTrials(const std::vector<feat::UtteranceRecord>& records) {
  std::vector<TrialUtterance> utts;
  utts.reserve(records.size());
  for (const auto& r : records) utts.push_back({r.utt_id, r.speaker_id, r.gender});
  return MakeTrials(utts);
}

std::size_t CountTargets(const std::vector<Trial>& trials) {
  std::size_t n = 0;
  for (const auto& t : trials) n += t.is_target;
  return n;
}

void WriteTrials(const std::filesystem::path& path, const std::vector<Trial>& trials) {
  std::ostringstream os;
  for (const auto& t : trials) {
    os << t.enroll << ' ' << t.test << ' ' << (t.is_target ? "target" : "nontarget") << '\n';
  }
  io::WriteFileAtomic(path, os.str());
}

std::vector<Trial> ReadTrials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trial file " + path.string());
  std::vector<Trial> trials;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    std::istringstream ls(line);
    Trial t;
    std::string label, extra;
    if (!(ls >> t.enroll)) continue;
    if (!(ls >> t.test >> label) || (ls >> extra) || (label != "target" && label != "nontarget")) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": malformed trial line");
    }
    t.is_target = label == "target";
    trials.push_back(std::move(t));
  }
  return trials;
}

std::vector<double> ScoreTrials(const backend::BackendModel& model,
                                const backend::EmbeddingSet& embeddings,
                                const std::vector<Trial>& trials) {
  std::unordered_map<std::string, Eigen::VectorXd> projected;
  auto get = [&](const std::string& id) -> const Eigen::VectorXd& {
    auto it = projected.find(id);
    if (it == projected.end()) {
      it = projected.emplace(id, embeddings.Find(id).vector).first;
    }
    return it->second;
  };
  std::vector<double> scores;
  scores.reserve(trials.size());
  for (const auto& t : trials) {
    const double s = model.Score(get(t.enroll), get(t.test));
    if (!std::isfinite(s)) throw NumericError("non-finite score for " + t.enroll + " " + t.test);
    scores.push_back(s);
  }
  return scores;
}

void WriteScores(const std::filesystem::path& path, const std::vector<Trial>& trials,
                 const std::vector<double>& scores) {
  if (trials.size() != scores.size()) throw DimensionError("one score per trial expected");
  std::ostringstream os;
  char buf[64];
  for (std::size_t i = 0; i < trials.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", scores[i]);
    os << trials[i].enroll << ' ' << trials[i].test << ' ' << buf << '\n';
  }
  io::WriteFileAtomic(path, os.str());
}

}  // namespace ttsspk::eval
