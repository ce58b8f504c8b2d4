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

#ifndef TTSSPK_TESTS_ORACLES_H_
#define TTSSPK_TESTS_ORACLES_H_

// Deliberately naive reference implementations used to check the library.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ttsspk::testing {

struct StepPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

// Error rates at every distinct score and at +inf, each counted from
// scratch.
inline std::vector<StepPoint> BruteForceSweep(const std::vector<double>& scores,
                                              const std::vector<bool>& target) {
  std::set<double> cands(scores.begin(), scores.end());
  cands.insert(std::numeric_limits<double>::infinity());
  double nt = 0, nn = 0;
  for (bool t : target) (t ? nt : nn) += 1;
  std::vector<StepPoint> out;
  for (double th : cands) {
    double miss = 0, fa = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool accept = scores[i] >= th;
      if (target[i] && !accept) miss += 1;
      if (!target[i] && accept) fa += 1;
    }
    out.push_back({th, miss / nt, fa / nn});
  }
  return out;
}

// Step-function EER: min over thresholds of max(P_miss, P_fa).
inline double BruteForceEer(const std::vector<double>& scores, const std::vector<bool>& target) {
  double best = 1.0;
  for (const auto& p : BruteForceSweep(scores, target)) best = std::min(best, std::max(p.p_miss, p.p_fa));
  return best;
}

inline double BruteForceMinDcf(const std::vector<double>& scores, const std::vector<bool>& target,
                               double p = 0.01) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : BruteForceSweep(scores, target)) {
    best = std::min(best, (p * s.p_miss + (1 - p) * s.p_fa) / std::min(p, 1 - p));
  }
  return best;
}

// Closed-form trial counts for groups of (gender, speaker) -> utterances:
// sum over genders of C(n_g, 2), of which sum over speakers of C(n_s, 2)
// are targets.
inline std::pair<std::size_t, std::size_t> SameGenderPairCounts(
    const std::vector<std::pair<std::string, std::string>>& gender_speaker) {
  std::map<std::string, std::size_t> by_gender;
  std::map<std::string, std::size_t> by_speaker;
  for (const auto& [g, s] : gender_speaker) {
    ++by_gender[g];
    ++by_speaker[s];
  }
  std::size_t trials = 0, targets = 0;
  for (const auto& [g, n] : by_gender) trials += n * (n - 1) / 2;
  for (const auto& [s, n] : by_speaker) targets += n * (n - 1) / 2;
  return {trials, targets};
}

}  // namespace ttsspk::testing

#endif  // TTSSPK_TESTS_ORACLES_H_
