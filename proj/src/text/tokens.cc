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

#include "ttsspk/text/tokens.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"
#include "ttsspk/common/log.h"

namespace ttsspk::text {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits UTF-8 text into code points.
std::vector<std::string> Utf8Chars(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    const unsigned char c = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    out.push_back(word.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace

std::string TokenKindString(TokenKind k) {
  return k == TokenKind::kTranscript ? "transcript" : "alignment";
}

TokenKind ParseTokenKind(const std::string& s) {
  if (s == "transcript") return TokenKind::kTranscript;
  if (s == "alignment") return TokenKind::kAlignment;
  throw InputError("token kind must be transcript or alignment, got '" + s + "'");
}

TokenizationMode ParseTokenizationMode(const std::string& s) {
  if (s == "char") return TokenizationMode::kChar;
  if (s == "word") return TokenizationMode::kWord;
  throw ConfigError("tokenization must be \"char\" or \"word\", got \"" + s + "\"");
}

RawTokens ReadTokenFile(const std::filesystem::path& path, TokenizationMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open token file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  RawTokens raw;
  const std::string first = lines.empty() ? "" : Trim(lines[0]);
  if (first.rfind("sr=", 0) == 0) {
    raw.kind = TokenKind::kAlignment;
    try {
      std::size_t used = 0;
      raw.frame_sr = std::stoi(first.substr(3), &used);
      if (used != first.size() - 3) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError(path.string() + ":1: malformed header '" + first + "'");
    }
    if (raw.frame_sr < 1) throw InputError(path.string() + ":1: sr must be >= 1");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::string label = Trim(lines[i]);
      if (label.empty()) continue;
      if (label.find_first_of(" \t") != std::string::npos) {
        throw InputError(path.string() + ":" + std::to_string(i + 1) +
                         ": expected one label per line");
      }
      raw.symbols.push_back(label);
    }
  } else {
    raw.kind = TokenKind::kTranscript;
    for (const std::string& l : lines) {
      std::istringstream words(l);
      std::string w;
      while (words >> w) {
        if (mode == TokenizationMode::kWord) {
          raw.symbols.push_back(w);
        } else {
          for (auto& c : Utf8Chars(w)) raw.symbols.push_back(c);
        }
      }
    }
  }
  if (raw.symbols.empty()) throw InputError(path.string() + ": no tokens");
  return raw;
}

TokenSequence EncodeTokens(const std::string& utt_id, const RawTokens& raw,
                           const Vocabulary& vocab, bool append_eos) {
  if (raw.symbols.empty()) throw InputError(utt_id + ": empty token sequence");
  TokenSequence seq;
  seq.utt_id = utt_id;
  seq.kind = raw.kind;
  seq.frame_sr = raw.kind == TokenKind::kAlignment ? raw.frame_sr : 0;
  for (const auto& s : raw.symbols) {
    try {
      seq.ids.push_back(vocab.Id(s));
    } catch (const InputError& e) {
      throw InputError(utt_id + ": " + e.what());
    }
  }
  if (append_eos && raw.kind == TokenKind::kTranscript) seq.ids.push_back(kEosId);
  return seq;
}

std::vector<std::string> DecodeTokens(const TokenSequence& seq, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(seq.ids.size());
  for (std::size_t id : seq.ids) out.push_back(vocab.Symbol(id));
  return out;
}

TokenSequence UpsampleAlignment(const TokenSequence& seq, int target_sr) {
  if (seq.kind != TokenKind::kAlignment) {
    throw ConfigError(seq.utt_id + ": only alignments can be upsampled");
  }
  if (target_sr < 1 || seq.frame_sr < 1 || seq.frame_sr % target_sr != 0) {
    throw ConfigError(seq.utt_id + ": cannot resample SR" + std::to_string(seq.frame_sr) +
                      " to SR" + std::to_string(target_sr));
  }
  const int factor = seq.frame_sr / target_sr;
  TokenSequence out = seq;
  out.frame_sr = target_sr;
  out.ids.clear();
  out.ids.reserve(seq.ids.size() * factor);
  for (std::size_t id : seq.ids) out.ids.insert(out.ids.end(), factor, id);
  return out;
}

AlignmentFit FitAlignment(const TokenSequence& seq, std::size_t feature_frames,
                          std::size_t tolerance) {
  if (seq.kind != TokenKind::kAlignment) {
    return {seq.ids.size(), feature_frames, true};
  }
  const std::size_t sr = static_cast<std::size_t>(seq.frame_sr);
  const std::size_t covered = seq.ids.size() * sr;
  AlignmentFit fit;
  const std::size_t diff = covered > feature_frames ? covered - feature_frames
                                                    : feature_frames - covered;
  fit.within_tolerance = diff <= tolerance;
  if (!fit.within_tolerance) {
    LogWarning(seq.utt_id + ": alignment covers " + std::to_string(covered) +
               " frames but features have " + std::to_string(feature_frames));
  }
  if (covered >= feature_frames) {
    fit.num_frames = feature_frames;
    fit.num_labels = (feature_frames + sr - 1) / sr;
  } else {
    fit.num_labels = seq.ids.size();
    fit.num_frames = covered;
  }
  return fit;
}

void WriteTokenCache(const std::filesystem::path& path,
                     const std::vector<TokenSequence>& seqs) {
  std::ostringstream os;
  for (const auto& s : seqs) {
    nlohmann::json j = {{"utt_id", s.utt_id},
                        {"ids", s.ids},
                        {"kind", TokenKindString(s.kind)},
                        {"frame_sr", s.frame_sr}};
    os << j.dump() << "\n";
  }
  io::WriteFileAtomic(path, os.str());
}

std::vector<TokenSequence> ReadTokenCache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open token cache " + path.string());
  std::vector<TokenSequence> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TokenSequence s;
      s.utt_id = j.at("utt_id").get<std::string>();
      s.ids = j.at("ids").get<std::vector<std::size_t>>();
      s.kind = ParseTokenKind(j.at("kind").get<std::string>());
      s.frame_sr = j.at("frame_sr").get<int>();
      if (s.ids.empty()) throw InputError("empty ids");
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ttsspk::text
