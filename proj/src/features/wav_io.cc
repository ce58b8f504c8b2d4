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

#include "ttsspk/features/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::feat {
namespace {

std::uint16_t ReadU16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw InputError("truncated WAVE header");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void WriteU16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

}  // namespace

void WriteWav(const std::filesystem::path& path, const Waveform& wave) {
  std::ostringstream os;
  const auto n = static_cast<std::uint32_t>(wave.samples.size());
  const auto rate = static_cast<std::uint32_t>(wave.sample_rate);
  io::WriteBytes(os, "RIFF");
  io::WriteU32(os, 36 + n * 2);
  io::WriteBytes(os, "WAVE");
  io::WriteBytes(os, "fmt ");
  io::WriteU32(os, 16);
  WriteU16(os, 1);  // PCM
  WriteU16(os, 1);  // mono
  io::WriteU32(os, rate);
  io::WriteU32(os, rate * 2);
  WriteU16(os, 2);
  WriteU16(os, 16);
  io::WriteBytes(os, "data");
  io::WriteU32(os, n * 2);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(c * 32767.0));
    WriteU16(os, static_cast<std::uint16_t>(q));
  }
  io::WriteFileAtomic(path, os.str());
}

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open audio file " + path.string());
  if (io::ReadBytes(in, 4) != "RIFF") throw InputError(path.string() + ": not a RIFF file");
  io::ReadU32(in);
  if (io::ReadBytes(in, 4) != "WAVE") throw InputError(path.string() + ": not a WAVE file");
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (true) {
    const std::string id = io::ReadBytes(in, 4);
    const std::uint32_t size = io::ReadU32(in);
    if (id == "fmt ") {
      format = ReadU16(in);
      channels = ReadU16(in);
      rate = io::ReadU32(in);
      io::ReadU32(in);
      ReadU16(in);
      bits = ReadU16(in);
      if (size > 16) io::ReadBytes(in, size - 16);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw InputError(path.string() + ": data chunk before fmt");
      if (channels != 1) throw InputError(path.string() + ": only mono audio is supported");
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      if (format == 1 && bits == 16) {
        w.samples.resize(size / 2);
        for (double& s : w.samples) {
          s = static_cast<double>(static_cast<std::int16_t>(ReadU16(in))) / 32767.0;
        }
      } else if (format == 3 && bits == 32) {
        w.samples.resize(size / 4);
        for (double& s : w.samples) {
          const std::uint32_t raw = io::ReadU32(in);
          float f;
          std::memcpy(&f, &raw, sizeof f);
          s = static_cast<double>(f);
        }
      } else {
        throw InputError(path.string() + ": unsupported sample format");
      }
      return w;
    } else {
      io::ReadBytes(in, size + (size & 1));
    }
  }
}

}  // namespace ttsspk::feat
