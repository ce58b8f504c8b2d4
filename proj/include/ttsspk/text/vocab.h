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

#ifndef TTSSPK_TEXT_VOCAB_H_
#define TTSSPK_TEXT_VOCAB_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ttsspk::text {

inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kEosId = 1;
inline constexpr const char* kPadSymbol = "<pad>";
inline constexpr const char* kEosSymbol = "<eos>";

class Vocabulary {
 public:
  // Only the reserved entries.
  Vocabulary();
  // Reserved entries followed by `symbols`, which must be distinct.
  explicit Vocabulary(const std::vector<std::string>& symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& Symbol(std::size_t id) const;
  bool Contains(const std::string& symbol) const { return index_.count(symbol) > 0; }
  // Throws InputError naming the symbol when it is unknown.
  std::size_t Id(const std::string& symbol) const;

  bool operator==(const Vocabulary& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t> index_;
};

// Deduplicates and sorts every observed symbol. Throws InputError when no
// symbol is observed.
Vocabulary BuildVocab(const std::vector<std::vector<std::string>>& sequences);

// One symbol per line, reserved entries included.
void WriteVocab(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary ReadVocab(const std::filesystem::path& path);

}  // namespace ttsspk::text

#endif  // TTSSPK_TEXT_VOCAB_H_
