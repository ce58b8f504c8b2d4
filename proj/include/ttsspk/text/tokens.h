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

#ifndef TTSSPK_TEXT_TOKENS_H_
#define TTSSPK_TEXT_TOKENS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ttsspk/text/vocab.h"

namespace ttsspk::text {

enum class TokenKind { kTranscript, kAlignment };
enum class TokenizationMode { kChar, kWord };

std::string TokenKindString(TokenKind k);
TokenKind ParseTokenKind(const std::string& s);
TokenizationMode ParseTokenizationMode(const std::string& s);

// Symbols read from a token file, before vocabulary lookup.
struct RawTokens {
  std::vector<std::string> symbols;
  TokenKind kind = TokenKind::kTranscript;
  int frame_sr = 0;  // alignment only
};

struct TokenSequence {
  std::string utt_id;
  std::vector<std::size_t> ids;
  TokenKind kind = TokenKind::kTranscript;
  int frame_sr = 0;

  std::size_t size() const { return ids.size(); }
};

// Files whose first line is "sr=<int>" are alignments (one label per line);
// anything else is a transcript of whitespace-separated symbols, split into
// characters in char mode. Errors carry the file name and line number.
RawTokens ReadTokenFile(const std::filesystem::path& path, TokenizationMode mode);

// Transcripts get EOS appended when requested; alignments never do.
TokenSequence EncodeTokens(const std::string& utt_id, const RawTokens& raw,
                           const Vocabulary& vocab, bool append_eos);
std::vector<std::string> DecodeTokens(const TokenSequence& seq, const Vocabulary& vocab);

// Repeats each label frame_sr / target_sr times.
TokenSequence UpsampleAlignment(const TokenSequence& seq, int target_sr);

// Frames an alignment and a feature matrix agree on. Differences of more
// than `tolerance` frames emit a warning; both sides are truncated to the
// shorter either way.
struct AlignmentFit {
  std::size_t num_labels = 0;
  std::size_t num_frames = 0;
  bool within_tolerance = true;
};
AlignmentFit FitAlignment(const TokenSequence& seq, std::size_t feature_frames,
                          std::size_t tolerance = 2);

// Token cache: one JSON object per line {utt_id, ids, kind, frame_sr}.
void WriteTokenCache(const std::filesystem::path& path,
                     const std::vector<TokenSequence>& seqs);
std::vector<TokenSequence> ReadTokenCache(const std::filesystem::path& path);

}  // namespace ttsspk::text

#endif  // TTSSPK_TEXT_TOKENS_H_
