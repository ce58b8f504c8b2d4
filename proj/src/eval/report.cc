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

#include "ttsspk/eval/report.h"

#include <chrono>
#include <cmath>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::eval {
namespace {

std::string UtcNow() {
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json Threshold(double t) {
  return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json("inf");
}

}  // namespace

double RoundTo(double v, double quantum) { return std::round(v / quantum) * quantum; }

nlohmann::json MakeReport(const ReportInputs& in) {
  const DetMetrics& m = in.metrics;
  nlohmann::json j;
  j["eer"] = m.eer;
  j["eer_percent"] = RoundTo(100.0 * m.eer, 1e-6);
  j["eer_threshold"] = Threshold(m.eer_threshold);
  j["min_dcf"] = m.min_dcf;
  j["min_dcf_threshold"] = Threshold(m.min_dcf_threshold);
  j["dcf_params"] = {{"p_target", m.dcf.p_target}, {"c_miss", m.dcf.c_miss}, {"c_fa", m.dcf.c_fa}};
  j["n_trials"] = in.n_trials;
  j["n_target"] = in.n_target;
  j["config"] = in.config;
  j["checkpoint_id"] = in.checkpoint_id;
  return j;
}

void WriteReport(const std::filesystem::path& path, nlohmann::json report) {
  report[kTimestampKey] = UtcNow();
  io::WriteFileAtomic(path, report.dump(2) + "\n");
}

nlohmann::json ReadReportWithoutTimestamp(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::ReadTextFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("report " + path.string() + ": " + e.what());
  }
  j.erase(kTimestampKey);
  return j;
}

}  // namespace ttsspk::eval
