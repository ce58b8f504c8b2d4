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

#include "ttsspk/features/synth.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"

namespace ttsspk::feat {
namespace {

constexpr double kCrossfadeMs = 10.0;
constexpr double kPeakLevel = 0.5;
// Per-utterance session variation around the speaker's profile.
constexpr double kF0Jitter = 0.10;
constexpr double kTiltJitterDb = 2.0;
constexpr double kNoiseJitter = 0.5;

std::string Format(const char* pattern, int value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

// Spectral envelope of one token for one speaker at frequency f.
double Envelope(const TokenSpec& token, const SpeakerProfile& profile,
                double f, double f0) {
  double amp = 0.0;
  for (const Formant& fm : token.formants) {
    const double center = fm.freq * profile.formant_shifts.scale;
    const double x = (f - center) / fm.bandwidth;
    amp += fm.gain / (1.0 + x * x);
  }
  const double octaves = std::log2(f / f0);
  return amp * std::pow(10.0, profile.formant_shifts.tilt_db_per_octave * octaves / 20.0);
}

nlohmann::json ProfileToJson(const SpeakerProfile& p) {
  return {{"speaker_id", p.speaker_id},
          {"gender", GenderString(p.gender)},
          {"f0", p.f0},
          {"formant_scale", p.formant_shifts.scale},
          {"tilt_db_per_octave", p.formant_shifts.tilt_db_per_octave},
          {"noise_level", p.noise_level}};
}

SpeakerProfile ProfileFromJson(const nlohmann::json& j) {
  try {
    SpeakerProfile p;
    p.speaker_id = j.at("speaker_id").get<std::string>();
    p.gender = ParseGender(j.at("gender").get<std::string>());
    p.f0 = j.at("f0").get<double>();
    p.formant_shifts.scale = j.at("formant_scale").get<double>();
    p.formant_shifts.tilt_db_per_octave = j.at("tilt_db_per_octave").get<double>();
    p.noise_level = j.at("noise_level").get<double>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad synthetic speaker profile: ") + e.what());
  }
}

}  // namespace

TokenInventory TokenInventory::Default() {
  // Vowel-like formant triples, loosely after adult average values.
  static const double kFormants[12][3] = {
      {730, 1090, 2440}, {270, 2290, 3010}, {300, 870, 2240},
      {530, 1840, 2480}, {660, 1720, 2410}, {490, 1350, 1690},
      {570, 840, 2410},  {440, 1020, 2240}, {390, 1990, 2550},
      {640, 1190, 2390}, {350, 1500, 2600}, {450, 1650, 3300}};
  TokenInventory inv;
  for (int i = 0; i < 12; ++i) {
    TokenSpec t;
    t.symbol = std::string(1, static_cast<char>('a' + i));
    t.duration_ms = 60.0 + 5.0 * i;
    t.formants = {{kFormants[i][0], 80.0, 1.0},
                  {kFormants[i][1], 100.0, 0.5 + 0.04 * (i % 4)},
                  {kFormants[i][2], 140.0, 0.25 + 0.03 * (i % 3)}};
    inv.tokens.push_back(std::move(t));
  }
  return inv;
}

std::size_t TokenInventory::IdOf(const std::string& symbol) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].symbol == symbol) return i;
  }
  throw InputError("unknown synthetic token '" + symbol + "'");
}

std::string GenderString(Gender g) { return g == Gender::kMale ? "M" : "F"; }

Gender ParseGender(const std::string& s) {
  if (s == "M") return Gender::kMale;
  if (s == "F") return Gender::kFemale;
  throw InputError("gender must be \"M\" or \"F\", got \"" + s + "\"");
}

void SpeakerProfile::Validate() const {
  if (!(f0 >= 60.0 && f0 <= 400.0)) {
    throw DomainError("speaker " + speaker_id + ": f0 " + std::to_string(f0) +
                      " Hz outside [60, 400]");
  }
  if (!(noise_level >= 0.0 && noise_level <= 0.2)) {
    throw DomainError("speaker " + speaker_id + ": noise_level outside [0, 0.2]");
  }
  if (!(formant_shifts.scale > 0.0) || !std::isfinite(formant_shifts.tilt_db_per_octave)) {
    throw DomainError("speaker " + speaker_id + ": invalid formant shifts");
  }
}

SynthResult SynthUtterance(const SpeakerProfile& profile,
                           const std::vector<std::size_t>& token_ids,
                           std::uint64_t seed, const TokenInventory& inventory,
                           const FeatureConfig& features) {
  profile.Validate();
  if (token_ids.empty()) throw InputError("cannot synthesize an empty token sequence");
  for (std::size_t id : token_ids) {
    if (id >= inventory.size()) {
      throw InputError("token id " + std::to_string(id) + " not in inventory of " +
                       std::to_string(inventory.size()));
    }
  }
  const double sr = features.sample_rate;
  std::mt19937_64 rng(seed);
  using Uniform = std::uniform_real_distribution<double>;
  const double f0 = profile.f0 * (1.0 + Uniform(-kF0Jitter, kF0Jitter)(rng));
  SpeakerProfile session = profile;
  session.formant_shifts.tilt_db_per_octave += Uniform(-kTiltJitterDb, kTiltJitterDb)(rng);
  session.noise_level *= 1.0 + Uniform(-kNoiseJitter, kNoiseJitter)(rng);

  // Segment boundaries in samples.
  std::vector<std::size_t> ends;
  std::size_t total = 0;
  for (std::size_t id : token_ids) {
    total += static_cast<std::size_t>(std::lround(inventory.tokens[id].duration_ms * sr / 1000.0));
    ends.push_back(total);
  }

  const std::size_t n_harm = static_cast<std::size_t>(std::floor((0.5 * sr - 1.0) / f0));
  std::vector<std::vector<double>> amps(token_ids.size(), std::vector<double>(n_harm));
  for (std::size_t k = 0; k < token_ids.size(); ++k) {
    const TokenSpec& tok = inventory.tokens[token_ids[k]];
    for (std::size_t h = 0; h < n_harm; ++h) {
      amps[k][h] = Envelope(tok, session, f0 * static_cast<double>(h + 1), f0);
    }
  }

  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::vector<std::complex<double>> osc(n_harm), rot(n_harm);
  for (std::size_t h = 0; h < n_harm; ++h) {
    osc[h] = std::polar(1.0, phase_dist(rng));
    rot[h] = std::polar(1.0, 2.0 * std::numbers::pi * f0 * static_cast<double>(h + 1) / sr);
  }

  const double half_fade = 0.5 * kCrossfadeMs * sr / 1000.0;
  std::vector<double> x(total);
  std::vector<double> a(n_harm);
  std::size_t seg = 0;
  for (std::size_t n = 0; n < total; ++n) {
    while (n >= ends[seg]) ++seg;
    // Blend towards the neighbouring token inside the crossfade window.
    const double pos = static_cast<double>(n) + 0.5;
    std::size_t other = seg;
    double alpha = 0.0;
    if (seg + 1 < ends.size() && pos > ends[seg] - half_fade) {
      other = seg + 1;
      alpha = 0.5 * (pos - (ends[seg] - half_fade)) / half_fade;
    } else if (seg > 0 && pos < ends[seg - 1] + half_fade) {
      other = seg - 1;
      alpha = 0.5 * ((ends[seg - 1] + half_fade) - pos) / half_fade;
    }
    double s = 0.0;
    const std::vector<double>& a0 = amps[seg];
    const std::vector<double>& a1 = amps[other];
    for (std::size_t h = 0; h < n_harm; ++h) {
      s += ((1.0 - alpha) * a0[h] + alpha * a1[h]) * osc[h].imag();
      osc[h] *= rot[h];
    }
    x[n] = s;
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? kPeakLevel / peak : 0.0;
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : x) {
    v = std::clamp(v * gain + session.noise_level * noise(rng), -1.0, 1.0);
  }

  SynthResult out;
  out.wave.samples = std::move(x);
  out.wave.sample_rate = features.sample_rate;
  out.f0 = f0;
  const std::size_t fl = features.frame_length(), hop = features.hop();
  const std::size_t frames = NumFrames(total, fl, hop);
  out.frame_alignment.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t center = t * hop + fl / 2;
    const auto it = std::upper_bound(ends.begin(), ends.end(), center);
    const std::size_t k = std::min<std::size_t>(it - ends.begin(), ends.size() - 1);
    out.frame_alignment.push_back(token_ids[k]);
  }
  return out;
}

int EffectiveEvalSpeakers(const CorpusOptions& opts) {
  int n = opts.n_eval_speakers;
  if (n <= 0) n = std::max(1, static_cast<int>(std::lround(opts.n_speakers / 3.0)));
  return std::clamp(n, 1, std::max(1, opts.n_speakers - 1));
}

SyntheticCorpus GenerateCorpus(const CorpusOptions& opts,
                               const TokenInventory& inventory) {
  if (opts.n_speakers < 2) throw ConfigError("synthgen needs at least 2 speakers");
  if (opts.utts_per_speaker < 2) throw ConfigError("synthgen needs at least 2 utterances per speaker");
  if (opts.min_tokens < 1 || opts.max_tokens < opts.min_tokens) {
    throw ConfigError("synthgen: invalid token length range");
  }
  if (inventory.size() == 0) throw ConfigError("synthgen: empty token inventory");
  const int n_eval = EffectiveEvalSpeakers(opts);
  std::mt19937_64 rng(opts.seed);
  using Uniform = std::uniform_real_distribution<double>;

  SyntheticCorpus corpus;
  for (int s = 0; s < opts.n_speakers; ++s) {
    SpeakerProfile p;
    p.speaker_id = Format("spk%03d", s);
    p.gender = s % 2 == 0 ? Gender::kMale : Gender::kFemale;
    if (p.gender == Gender::kMale) {
      p.f0 = Uniform(95.0, 145.0)(rng);
      p.formant_shifts.scale = Uniform(0.88, 1.0)(rng);
    } else {
      p.f0 = Uniform(175.0, 255.0)(rng);
      p.formant_shifts.scale = Uniform(1.02, 1.15)(rng);
    }
    p.formant_shifts.tilt_db_per_octave = Uniform(-9.0, -3.0)(rng);
    p.noise_level = Uniform(0.005, 0.03)(rng);
    corpus.speakers.push_back(p);
  }
  std::uniform_int_distribution<int> len_dist(opts.min_tokens, opts.max_tokens);
  std::uniform_int_distribution<std::size_t> tok_dist(0, inventory.size() - 1);
  for (int s = 0; s < opts.n_speakers; ++s) {
    for (int u = 0; u < opts.utts_per_speaker; ++u) {
      SyntheticUtterance utt;
      utt.profile = corpus.speakers[s];
      utt.utt_id = corpus.speakers[s].speaker_id + Format("_u%03d", u);
      const int len = len_dist(rng);
      for (int i = 0; i < len; ++i) utt.token_ids.push_back(tok_dist(rng));
      utt.seed = rng();
      utt.subset = s >= opts.n_speakers - n_eval ? Subset::kEval : Subset::kTrain;
      corpus.utterances.push_back(std::move(utt));
    }
  }
  return corpus;
}

Manifest WriteCorpus(const SyntheticCorpus& corpus, const TokenInventory& inventory,
                     const std::filesystem::path& dir, const FeatureConfig& features,
                     int align_sr) {
  if (align_sr < 1) throw ConfigError("alignment sr must be >= 1");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Manifest text_manifest, align_manifest;
  text_manifest.base_dir = align_manifest.base_dir = dir;
  for (const SyntheticUtterance& utt : corpus.utterances) {
    const SynthResult res = SynthUtterance(utt.profile, utt.token_ids, utt.seed, inventory, features);
    const std::string wav_rel = "wav/" + utt.utt_id + ".wav";
    const std::string text_rel = "text/" + utt.utt_id + ".txt";
    const std::string ali_rel = "align/" + utt.utt_id + ".ali";
    WriteWav(dir / wav_rel, res.wave);

    std::string transcript;
    for (std::size_t i = 0; i < utt.token_ids.size(); ++i) {
      if (i) transcript += ' ';
      transcript += inventory.tokens[utt.token_ids[i]].symbol;
    }
    io::WriteFileAtomic(dir / text_rel, transcript + "\n");

    // One label per align_sr frames, taken at the middle frame of each group.
    std::string ali = "sr=" + std::to_string(align_sr) + "\n";
    const std::size_t frames = res.frame_alignment.size();
    for (std::size_t g = 0; g * align_sr < frames; ++g) {
      const std::size_t t = std::min(frames - 1, g * align_sr + align_sr / 2);
      ali += inventory.tokens[res.frame_alignment[t]].symbol + "\n";
    }
    io::WriteFileAtomic(dir / ali_rel, ali);

    UtteranceRecord rec;
    rec.utt_id = utt.utt_id;
    rec.speaker_id = utt.profile.speaker_id;
    rec.gender = GenderString(utt.profile.gender);
    rec.audio_source = wav_rel;
    rec.text_source = text_rel;
    rec.subset = utt.subset;
    text_manifest.records.push_back(rec);
    rec.text_source = ali_rel;
    align_manifest.records.push_back(rec);
  }
  nlohmann::json speakers = nlohmann::json::array();
  for (const SpeakerProfile& p : corpus.speakers) speakers.push_back(ProfileToJson(p));
  io::WriteFileAtomic(dir / "speakers.json", speakers.dump(2) + "\n");
  WriteManifest(dir / "manifest.jsonl", text_manifest);
  WriteManifest(dir / "manifest_align.jsonl", align_manifest);
  return text_manifest;
}

nlohmann::json SyntheticSourceToJson(const SyntheticUtterance& utt,
                                     const TokenInventory& inventory) {
  nlohmann::json tokens = nlohmann::json::array();
  for (std::size_t id : utt.token_ids) tokens.push_back(inventory.tokens.at(id).symbol);
  return {{"type", "synthetic"},
          {"speaker", ProfileToJson(utt.profile)},
          {"tokens", tokens},
          {"seed", utt.seed}};
}

Waveform RenderSyntheticSource(const nlohmann::json& source,
                               const TokenInventory& inventory,
                               const FeatureConfig& features) {
  if (!source.is_object() || source.value("type", "") != "synthetic") {
    throw InputError("audio_source object must have \"type\": \"synthetic\"");
  }
  std::vector<std::size_t> ids;
  std::uint64_t seed = 0;
  try {
    for (const auto& t : source.at("tokens")) ids.push_back(inventory.IdOf(t.get<std::string>()));
    seed = source.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad synthetic audio_source: ") + e.what());
  }
  return SynthUtterance(ProfileFromJson(source.at("speaker")), ids, seed, inventory, features).wave;
}

Waveform LoadAudio(const Manifest& manifest, const UtteranceRecord& record,
                   const FeatureConfig& features) {
  if (record.audio_source.is_object()) {
    return RenderSyntheticSource(record.audio_source, TokenInventory::Default(), features);
  }
  return ReadWav(manifest.Resolve(record.audio_source.get<std::string>()));
}

}  // namespace ttsspk::feat
