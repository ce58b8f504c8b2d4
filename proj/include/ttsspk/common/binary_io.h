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

#ifndef TTSSPK_COMMON_BINARY_IO_H_
#define TTSSPK_COMMON_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Little-endian scalar I/O used by the feature cache and checkpoint formats.
// Readers throw InputError on truncation.

namespace ttsspk::io {

void WriteU32(std::ostream& os, std::uint32_t v);
void WriteU64(std::ostream& os, std::uint64_t v);
void WriteF64(std::ostream& os, double v);
void WriteF64s(std::ostream& os, std::span<const double> values);
void WriteBytes(std::ostream& os, std::string_view bytes);

std::uint32_t ReadU32(std::istream& is);
std::uint64_t ReadU64(std::istream& is);
double ReadF64(std::istream& is);
void ReadF64s(std::istream& is, std::span<double> out);
std::string ReadBytes(std::istream& is, std::size_t n);

std::string ReadTextFile(const std::filesystem::path& path);
// Writes via a temporary sibling and rename.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// FNV-1a, 64-bit.
std::uint64_t Fnv1a64(std::string_view bytes);
std::string HexU64(std::uint64_t v);

}  // namespace ttsspk::io

#endif  // TTSSPK_COMMON_BINARY_IO_H_
