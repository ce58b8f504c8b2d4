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

#ifndef TTSSPK_FEATURES_MEL_H_
#define TTSSPK_FEATURES_MEL_H_

#include <cstddef>
#include <filesystem>
#include <vector>

#include "ttsspk/features/wav_io.h"

namespace ttsspk::feat {

struct FeatureConfig {
  int sample_rate = 16000;
  double frame_length_ms = 50.0;
  double hop_ms = 12.5;
  std::size_t n_fft = 1024;
  std::size_t n_mels = 40;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;

  std::size_t frame_length() const;  // samples
  std::size_t hop() const;           // samples
  double frame_shift() const { return hop_ms / 1000.0; }
  // Throws ConfigError when the configuration is unusable.
  void Validate() const;
};

// Row-major [rows x cols] matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// T x D_a log-mel energies.
struct MelSpectrogram {
  std::size_t num_frames = 0;
  std::size_t num_bins = 0;
  double frame_shift = 0.0125;
  std::vector<double> values;

  double operator()(std::size_t t, std::size_t d) const { return values[t * num_bins + d]; }
};

double HzToMel(double hz);
double MelToHz(double mel);

std::size_t NumFrames(std::size_t num_samples, std::size_t frame_length,
                      std::size_t hop);

// Periodic Hann window of `length` samples.
std::vector<double> HannWindow(std::size_t length);

// |DFT| of Hann-windowed frames: T x (n_fft / 2 + 1).
Matrix StftMagnitude(const Waveform& wave, std::size_t frame_length,
                     std::size_t hop, std::size_t n_fft);

// Triangular filters with centres equally spaced on the mel scale:
// n_mels x (n_fft / 2 + 1).
Matrix MelFilterbank(std::size_t n_fft, std::size_t n_mels, double sample_rate,
                     double f_min, double f_max);

// Centre frequencies (Hz) of the filters built by MelFilterbank.
std::vector<double> MelCenterFrequencies(std::size_t n_mels, double f_min,
                                         double f_max);

// log(max(mel power, floor)).
MelSpectrogram LogMel(const Waveform& wave, const FeatureConfig& cfg);

// Feature cache: "MELF", u32 T, u32 D_a, f64 frame_shift, T*D_a f64 values.
void WriteMelFile(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram ReadMelFile(const std::filesystem::path& path);

}  // namespace ttsspk::feat

#endif  // TTSSPK_FEATURES_MEL_H_
