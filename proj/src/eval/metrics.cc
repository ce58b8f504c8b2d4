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

#include "ttsspk/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ttsspk/common/error.h"

namespace ttsspk::eval {
namespace {

// Error rates at each distinct score used as threshold, ascending, followed
// by the reject-all point at +inf.
struct Sweep {
  std::vector<double> threshold;
  std::vector<double> p_miss;
  std::vector<double> p_fa;
};

Sweep BuildSweep(const std::vector<double>& scores, const std::vector<bool>& is_target) {
  if (scores.size() != is_target.size()) {
    throw DimensionError("scores and labels differ in length: " + std::to_string(scores.size()) +
                         " vs " + std::to_string(is_target.size()));
  }
  std::size_t n_target = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw NumericError("non-finite score at index " + std::to_string(i));
    n_target += is_target[i];
  }
  const std::size_t n_non = scores.size() - n_target;
  if (n_target == 0 || n_non == 0) {
    throw InputError("detection metrics need both target and non-target trials (got " +
                     std::to_string(n_target) + " target, " + std::to_string(n_non) +
                     " non-target)");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  Sweep s;
  // Walking upward, the scores below the current threshold are rejected.
  std::size_t miss = 0, false_accept = n_non;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    s.threshold.push_back(t);
    s.p_miss.push_back(static_cast<double>(miss) / n_target);
    s.p_fa.push_back(static_cast<double>(false_accept) / n_non);
    for (; i < order.size() && scores[order[i]] == t; ++i) {
      if (is_target[order[i]]) {
        ++miss;
      } else {
        --false_accept;
      }
    }
  }
  s.threshold.push_back(std::numeric_limits<double>::infinity());
  s.p_miss.push_back(1.0);
  s.p_fa.push_back(0.0);
  return s;
}

}  // namespace

EerResult ComputeEer(const std::vector<double>& scores, const std::vector<bool>& is_target) {
  const Sweep s = BuildSweep(scores, is_target);
  // P_miss - P_fa is -1 at the lowest score and 1 at +inf.
  std::size_t i = 0;
  while (s.p_miss[i] - s.p_fa[i] < 0.0) ++i;
  const double d_hi = s.p_miss[i] - s.p_fa[i];
  if (d_hi == 0.0 || i == 0) return {s.p_miss[i], s.threshold[i]};
  const double d_lo = s.p_miss[i - 1] - s.p_fa[i - 1];
  const double alpha = -d_lo / (d_hi - d_lo);
  EerResult r;
  r.eer = s.p_miss[i - 1] + alpha * (s.p_miss[i] - s.p_miss[i - 1]);
  r.threshold = std::isfinite(s.threshold[i])
                    ? s.threshold[i - 1] + alpha * (s.threshold[i] - s.threshold[i - 1])
                    : s.threshold[i - 1];
  return r;
}

MinDcfResult ComputeMinDcf(const std::vector<double>& scores, const std::vector<bool>& is_target,
                           const DcfParams& p) {
  if (!(p.p_target > 0.0 && p.p_target < 1.0) || !(p.c_miss > 0.0) || !(p.c_fa > 0.0)) {
    throw ConfigError("DCF needs 0 < p_target < 1 and positive costs");
  }
  const Sweep s = BuildSweep(scores, is_target);
  const double norm = std::min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target));
  MinDcfResult best{std::numeric_limits<double>::infinity(), 0.0};
  // The lowest threshold is also the accept-all point.
  for (std::size_t i = 0; i < s.threshold.size(); ++i) {
    const double dcf =
        (p.c_miss * p.p_target * s.p_miss[i] + p.c_fa * (1.0 - p.p_target) * s.p_fa[i]) / norm;
    if (dcf < best.min_dcf) best = {dcf, s.threshold[i]};
  }
  return best;
}

DetMetrics ComputeMetrics(const std::vector<double>& scores, const std::vector<bool>& is_target,
                          const DcfParams& params) {
  const EerResult e = ComputeEer(scores, is_target);
  const MinDcfResult d = ComputeMinDcf(scores, is_target, params);
  return {e.eer, e.threshold, d.min_dcf, d.threshold, params};
}

}  // namespace ttsspk::eval
