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

#ifndef TTSSPK_EVAL_REPORT_H_
#define TTSSPK_EVAL_REPORT_H_

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ttsspk/eval/metrics.h"

namespace ttsspk::eval {

inline constexpr const char* kTimestampKey = "created_at";

struct ReportInputs {
  DetMetrics metrics;
  std::size_t n_trials = 0;
  std::size_t n_target = 0;
  nlohmann::json config;  // echoed verbatim
  std::string checkpoint_id;
};

// EER appears as a fraction and in percent rounded to 1e-6.
nlohmann::json MakeReport(const ReportInputs& in);
// Adds the timestamp and writes pretty-printed JSON with sorted keys.
void WriteReport(const std::filesystem::path& path, nlohmann::json report);
// Parses a report and drops the timestamp.
nlohmann::json ReadReportWithoutTimestamp(const std::filesystem::path& path);

double RoundTo(double v, double quantum);

}  // namespace ttsspk::eval

#endif  // TTSSPK_EVAL_REPORT_H_
