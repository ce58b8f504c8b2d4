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

#ifndef TTSSPK_EVAL_METRICS_H_
#define TTSSPK_EVAL_METRICS_H_

#include <vector>

namespace ttsspk::eval {

// Decisions accept when score >= threshold. Both functions need at least
// one target and one non-target and throw InputError otherwise.

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Sweeps every distinct score as a threshold and interpolates linearly
// between the two thresholds where P_miss - P_fa changes sign.
EerResult ComputeEer(const std::vector<double>& scores, const std::vector<bool>& is_target);

struct DcfParams {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

struct MinDcfResult {
  double min_dcf = 0.0;  // normalized by min(c_miss p, c_fa (1 - p))
  double threshold = 0.0;  // +inf for the reject-all operating point
};

MinDcfResult ComputeMinDcf(const std::vector<double>& scores, const std::vector<bool>& is_target,
                           const DcfParams& params = {});

struct DetMetrics {
  double eer = 0.0;
  double eer_threshold = 0.0;
  double min_dcf = 0.0;
  double min_dcf_threshold = 0.0;
  DcfParams dcf;
};

DetMetrics ComputeMetrics(const std::vector<double>& scores, const std::vector<bool>& is_target,
                          const DcfParams& params = {});

}  // namespace ttsspk::eval

#endif  // TTSSPK_EVAL_METRICS_H_
