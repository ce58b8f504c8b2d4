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

#ifndef TTSSPK_FEATURES_SYNTH_H_
#define TTSSPK_FEATURES_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ttsspk/features/manifest.h"
#include "ttsspk/features/mel.h"
#include "ttsspk/features/wav_io.h"

namespace ttsspk::feat {

struct Formant {
  double freq = 500.0;       // Hz
  double bandwidth = 100.0;  // Hz
  double gain = 1.0;
};

struct TokenSpec {
  std::string symbol;
  double duration_ms = 80.0;
  std::vector<Formant> formants;
};

// The fixed set of synthetic "phones". Ids index into `tokens`.
struct TokenInventory {
  std::vector<TokenSpec> tokens;

  static TokenInventory Default();
  std::size_t size() const { return tokens.size(); }
  // Throws InputError for unknown symbols.
  std::size_t IdOf(const std::string& symbol) const;
};

enum class Gender { kMale, kFemale };

std::string GenderString(Gender g);
// Accepts "M" or "F"; throws InputError otherwise.
Gender ParseGender(const std::string& s);

// Speaker-specific reshaping of every token's spectral envelope.
struct FormantShifts {
  double scale = 1.0;               // multiplies every formant frequency
  double tilt_db_per_octave = -6.0; // applied above the fundamental
};

struct SpeakerProfile {
  std::string speaker_id;
  Gender gender = Gender::kMale;
  double f0 = 120.0;
  FormantShifts formant_shifts;
  double noise_level = 0.01;

  // Throws DomainError when a field is outside its admissible range.
  void Validate() const;
};

struct SynthResult {
  Waveform wave;
  // Fundamental actually rendered (profile f0 with per-utterance jitter).
  double f0 = 0.0;
  // Token id (inventory index) per feature frame.
  std::vector<std::size_t> frame_alignment;
};

SynthResult SynthUtterance(const SpeakerProfile& profile,
                           const std::vector<std::size_t>& token_ids,
                           std::uint64_t seed, const TokenInventory& inventory,
                           const FeatureConfig& features = {});

struct CorpusOptions {
  int n_speakers = 12;
  int utts_per_speaker = 20;
  // <= 0 selects max(1, round(n_speakers / 3)).
  int n_eval_speakers = 0;
  std::uint64_t seed = 1;
  int min_tokens = 5;
  int max_tokens = 15;
};

struct SyntheticUtterance {
  std::string utt_id;
  SpeakerProfile profile;
  std::vector<std::size_t> token_ids;
  std::uint64_t seed = 0;
  Subset subset = Subset::kTrain;
};

struct SyntheticCorpus {
  std::vector<SpeakerProfile> speakers;
  std::vector<SyntheticUtterance> utterances;
};

int EffectiveEvalSpeakers(const CorpusOptions& opts);

// Deterministic in `opts.seed`. Genders alternate M, F, M, ...; the last
// n_eval speakers form the eval subset.
SyntheticCorpus GenerateCorpus(const CorpusOptions& opts,
                               const TokenInventory& inventory);

// Materializes wav/, text/, align/ and the manifests under `dir`:
//   manifest.jsonl        transcripts as text_source
//   manifest_align.jsonl  frame alignments (sr=3) as text_source
//   speakers.json         speaker profiles
// Returns the transcript-mode manifest.
Manifest WriteCorpus(const SyntheticCorpus& corpus, const TokenInventory& inventory,
                     const std::filesystem::path& dir,
                     const FeatureConfig& features = {}, int align_sr = 3);

// JSON form of synthetic audio parameters usable as a manifest audio_source.
nlohmann::json SyntheticSourceToJson(const SyntheticUtterance& utt,
                                     const TokenInventory& inventory);
// Renders an audio_source object of the form produced above.
Waveform RenderSyntheticSource(const nlohmann::json& source,
                               const TokenInventory& inventory,
                               const FeatureConfig& features = {});

// Loads a record's audio: a WAV path relative to the manifest or a
// synthetic-parameter object.
Waveform LoadAudio(const Manifest& manifest, const UtteranceRecord& record,
                   const FeatureConfig& features = {});

}  // namespace ttsspk::feat

#endif  // TTSSPK_FEATURES_SYNTH_H_
