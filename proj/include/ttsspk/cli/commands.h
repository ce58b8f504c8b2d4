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

#ifndef TTSSPK_CLI_COMMANDS_H_
#define TTSSPK_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttsspk/cli/run_config.h"
#include "ttsspk/features/synth.h"
#include "ttsspk/model/trainer.h"

namespace ttsspk::cli {

namespace fs = std::filesystem;

// Every command writes only below its `out` directory.

struct SynthgenOptions {
  feat::CorpusOptions corpus;
  feat::FeatureConfig features;
  fs::path out;
};
// Corpus tree as produced by feat::WriteCorpus.
void Synthgen(const SynthgenOptions& o);

// Layout of a prepared directory:
//   features/<utt_id>.melf   cached log-mel features
//   tokens.jsonl, vocab.txt  token cache and vocabulary
//   utterances.jsonl         {utt_id, subset}
//   labels.jsonl             {utt_id, speaker_id, gender}
//   prepare.json             config echo and counts
struct PrepareOptions {
  fs::path manifest;
  RunConfig config;
  fs::path out;
};
void Prepare(const PrepareOptions& o);

struct PreparedUtterance {
  std::string utt_id;
  feat::Subset subset = feat::Subset::kTrain;
};
struct UtteranceLabel {
  std::string utt_id;
  std::string speaker_id;
  std::string gender;
};
std::vector<PreparedUtterance> ReadPreparedUtterances(const fs::path& prepared);
std::vector<UtteranceLabel> ReadLabels(const fs::path& prepared);
feat::MelSpectrogram ReadPreparedFeatures(const fs::path& prepared, const std::string& utt_id);

struct TrainCommandOptions {
  RunConfig config;
  fs::path prepared;
  fs::path out;
  bool resume = false;  // continue from out/last.ckpt when present
};
struct TrainSummary {
  std::vector<model::StepLog> steps;  // this invocation only
  fs::path checkpoint;
};
// Speaker labels are read only when model.spk_loss_weight > 0.
TrainSummary Train(const TrainCommandOptions& o);

struct ExtractOptions {
  fs::path checkpoint;
  fs::path prepared;
  fs::path out;
};
// Writes embeddings_train.jsonl and embeddings_eval.jsonl.
void Extract(const ExtractOptions& o);

struct BackendCommandOptions {
  fs::path embeddings;  // training embeddings
  backend::BackendConfig config;
  fs::path out;
};
// Writes backend.json and backend_fit.json (LDA dimension, EM trace).
void Backend(const BackendCommandOptions& o);

struct EvalOptions {
  fs::path backend;
  fs::path embeddings;  // eval embeddings
  fs::path checkpoint;  // optional; its id goes into the report
  nlohmann::json config = nlohmann::json::object();
  fs::path out;
};
// Writes trials.txt, scores.txt, report.json; returns the report without
// its timestamp.
nlohmann::json Eval(const EvalOptions& o);

// train -> extract -> backend -> eval under out/{train,embeddings,backend,eval}.
nlohmann::json RunPipeline(const RunConfig& config, const fs::path& prepared, const fs::path& out);

struct SweepOptions {
  RunConfig config;
  fs::path prepared;
  std::string param;
  std::vector<std::string> values;
  fs::path out;
};
struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  double eer_percent = 0.0;
  double min_dcf = 0.0;
};
// Row i trains with seed train.seed + i under out/row<i>; the table goes
// to sweep.json and sweep.tsv.
std::vector<SweepRow> Sweep(const SweepOptions& o);

struct SynthesizeOptions {
  fs::path checkpoint;
  fs::path prepared;
  std::string reference_utt;  // supplies the speaker embedding
  std::string text;
  std::size_t max_steps = 400;
  fs::path out;
};
// Writes out/synth.melf with raw log-mel frames.
void Synthesize(const SynthesizeOptions& o);

// The config echo placed in checkpoints and reports: everything but paths.
nlohmann::json ConfigEcho(const RunConfig& c);

}  // namespace ttsspk::cli

#endif  // TTSSPK_CLI_COMMANDS_H_
