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

#include "ttsspk/text/vocab.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::text {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& symbols) {
  symbols_ = {kPadSymbol, kEosSymbol};
  symbols_.insert(symbols_.end(), symbols.begin(), symbols.end());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw InputError("vocabulary symbols must be non-empty");
    if (!index_.emplace(symbols_[i], i).second) {
      throw InputError("duplicate vocabulary symbol '" + symbols_[i] + "'");
    }
  }
}

const std::string& Vocabulary::Symbol(std::size_t id) const {
  if (id >= symbols_.size()) {
    throw InputError("token id " + std::to_string(id) + " outside vocabulary of size " +
                     std::to_string(symbols_.size()));
  }
  return symbols_[id];
}

std::size_t Vocabulary::Id(const std::string& symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) throw InputError("symbol '" + symbol + "' is not in the vocabulary");
  return it->second;
}

Vocabulary BuildVocab(const std::vector<std::vector<std::string>>& sequences) {
  std::set<std::string> seen;
  for (const auto& seq : sequences) {
    for (const auto& s : seq) {
      if (s != kPadSymbol && s != kEosSymbol) seen.insert(s);
    }
  }
  if (seen.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

void WriteVocab(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ostringstream os;
  for (const auto& s : vocab.symbols()) os << s << "\n";
  io::WriteFileAtomic(path, os.str());
}

Vocabulary ReadVocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vocabulary " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.size() < 2 || lines[0] != kPadSymbol || lines[1] != kEosSymbol) {
    throw InputError(path.string() + ": vocabulary must start with the reserved symbols");
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + 2, lines.end()));
}

}  // namespace ttsspk::text
