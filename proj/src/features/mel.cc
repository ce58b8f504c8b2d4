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

#include "ttsspk/features/mel.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::feat {
namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void Execute() { fftw_execute(plan_); }
  double Magnitude(std::size_t k) const { return std::hypot(out_[k][0], out_[k][1]); }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

std::size_t FeatureConfig::frame_length() const {
  return static_cast<std::size_t>(std::lround(frame_length_ms * sample_rate / 1000.0));
}

std::size_t FeatureConfig::hop() const {
  return static_cast<std::size_t>(std::lround(hop_ms * sample_rate / 1000.0));
}

void FeatureConfig::Validate() const {
  if (sample_rate <= 0) throw ConfigError("features.sample_rate must be positive");
  if (frame_length() == 0 || hop() == 0) {
    throw ConfigError("features: frame length and hop must be at least one sample");
  }
  if (frame_length() > n_fft) {
    throw ConfigError("features: frame length " + std::to_string(frame_length()) +
                      " exceeds n_fft " + std::to_string(n_fft));
  }
  if (n_mels < 1) throw ConfigError("features.n_mels must be >= 1");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ConfigError("features: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (!(log_floor > 0.0)) throw ConfigError("features.log_floor must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t NumFrames(std::size_t num_samples, std::size_t frame_length,
                      std::size_t hop) {
  if (num_samples < frame_length) return 0;
  return 1 + (num_samples - frame_length) / hop;
}

std::vector<double> HannWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length));
  }
  return w;
}

Matrix StftMagnitude(const Waveform& wave, std::size_t frame_length,
                     std::size_t hop, std::size_t n_fft) {
  if (frame_length == 0 || frame_length > n_fft) {
    throw ConfigError("stft: need 0 < frame_length <= n_fft");
  }
  if (hop < 1) throw ConfigError("stft: hop must be >= 1");
  if (wave.samples.size() < frame_length) {
    throw InputError("stft: waveform of " + std::to_string(wave.samples.size()) +
                     " samples is shorter than one frame (" +
                     std::to_string(frame_length) + ")");
  }
  const std::size_t frames = NumFrames(wave.samples.size(), frame_length, hop);
  const std::size_t bins = n_fft / 2 + 1;
  const std::vector<double> window = HannWindow(frame_length);
  Matrix out{frames, bins, std::vector<double>(frames * bins)};
  RealFft fft(n_fft);
  double* in = fft.input();
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = wave.samples.data() + t * hop;
    for (std::size_t n = 0; n < frame_length; ++n) in[n] = src[n] * window[n];
    std::fill(in + frame_length, in + n_fft, 0.0);
    fft.Execute();
    for (std::size_t k = 0; k < bins; ++k) out(t, k) = fft.Magnitude(k);
  }
  return out;
}

std::vector<double> MelCenterFrequencies(std::size_t n_mels, double f_min,
                                         double f_max) {
  const double lo = HzToMel(f_min), hi = HzToMel(f_max);
  std::vector<double> centers(n_mels);
  for (std::size_t d = 0; d < n_mels; ++d) {
    centers[d] = MelToHz(lo + (hi - lo) * static_cast<double>(d + 1) /
                                  static_cast<double>(n_mels + 1));
  }
  return centers;
}

Matrix MelFilterbank(std::size_t n_fft, std::size_t n_mels, double sample_rate,
                     double f_min, double f_max) {
  const std::size_t bins = n_fft / 2 + 1;
  if (n_mels < 1) throw ConfigError("mel filterbank needs at least one filter");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ConfigError("mel filterbank: need 0 <= f_min < f_max <= sample_rate / 2");
  }
  if (n_mels > bins) {
    throw ConfigError("mel filterbank: " + std::to_string(n_mels) +
                      " filters cannot be spread over " + std::to_string(bins) +
                      " frequency bins");
  }
  const double lo = HzToMel(f_min), hi = HzToMel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(n_mels + 1));
  }
  Matrix fb{n_mels, bins, std::vector<double>(n_mels * bins, 0.0)};
  for (std::size_t d = 0; d < n_mels; ++d) {
    const double left = edges[d], center = edges[d + 1], right = edges[d + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > left && f <= center) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb(d, k) = w;
    }
  }
  return fb;
}

MelSpectrogram LogMel(const Waveform& wave, const FeatureConfig& cfg) {
  cfg.Validate();
  if (wave.sample_rate != cfg.sample_rate) {
    throw InputError("audio sample rate " + std::to_string(wave.sample_rate) +
                     " does not match features.sample_rate " +
                     std::to_string(cfg.sample_rate));
  }
  const Matrix mag = StftMagnitude(wave, cfg.frame_length(), cfg.hop(), cfg.n_fft);
  const Matrix fb = MelFilterbank(cfg.n_fft, cfg.n_mels, cfg.sample_rate, cfg.f_min, cfg.f_max);
  MelSpectrogram mel;
  mel.num_frames = mag.rows;
  mel.num_bins = cfg.n_mels;
  mel.frame_shift = cfg.frame_shift();
  mel.values.resize(mel.num_frames * mel.num_bins);
  std::vector<double> power(mag.cols);
  for (std::size_t t = 0; t < mag.rows; ++t) {
    for (std::size_t k = 0; k < mag.cols; ++k) power[k] = mag(t, k) * mag(t, k);
    for (std::size_t d = 0; d < cfg.n_mels; ++d) {
      double e = 0.0;
      for (std::size_t k = 0; k < mag.cols; ++k) e += fb(d, k) * power[k];
      mel.values[t * mel.num_bins + d] = std::log(std::max(e, cfg.log_floor));
    }
  }
  return mel;
}

void WriteMelFile(const std::filesystem::path& path, const MelSpectrogram& mel) {
  std::ostringstream os;
  io::WriteBytes(os, "MELF");
  io::WriteU32(os, static_cast<std::uint32_t>(mel.num_frames));
  io::WriteU32(os, static_cast<std::uint32_t>(mel.num_bins));
  io::WriteF64(os, mel.frame_shift);
  io::WriteF64s(os, mel.values);
  io::WriteFileAtomic(path, os.str());
}

MelSpectrogram ReadMelFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open feature file " + path.string());
  if (io::ReadBytes(in, 4) != "MELF") {
    throw InputError(path.string() + ": bad feature-cache magic");
  }
  MelSpectrogram mel;
  mel.num_frames = io::ReadU32(in);
  mel.num_bins = io::ReadU32(in);
  mel.frame_shift = io::ReadF64(in);
  if (mel.num_frames == 0 || mel.num_bins == 0) {
    throw InputError(path.string() + ": empty feature matrix");
  }
  mel.values.resize(mel.num_frames * mel.num_bins);
  io::ReadF64s(in, mel.values);
  return mel;
}

}  // namespace ttsspk::feat
