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

#ifndef TTSSPK_FEATURES_WAV_IO_H_
#define TTSSPK_FEATURES_WAV_IO_H_

#include <filesystem>
#include <vector>

namespace ttsspk::feat {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;
};

// Mono RIFF/WAVE, 16-bit PCM.
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

// Reads mono 16-bit PCM or 32-bit float WAVE files. Multi-channel input is
// rejected rather than silently down-mixed.
Waveform ReadWav(const std::filesystem::path& path);

}  // namespace ttsspk::feat

#endif  // TTSSPK_FEATURES_WAV_IO_H_
