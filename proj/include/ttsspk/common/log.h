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

#ifndef TTSSPK_COMMON_LOG_H_
#define TTSSPK_COMMON_LOG_H_

#include <string_view>

namespace ttsspk {

// Messages go to stderr. Info lines are dropped when quiet mode is on.
void LogInfo(std::string_view message);
void LogWarning(std::string_view message);
void SetQuiet(bool quiet);

}  // namespace ttsspk

#endif  // TTSSPK_COMMON_LOG_H_
