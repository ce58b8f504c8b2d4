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

#include "ttsspk/cli/commands.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ttsspk/backend/embeddings.h"
#include "ttsspk/backend/extract.h"
#include "ttsspk/backend/pipeline.h"
#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"
#include "ttsspk/common/log.h"
#include "ttsspk/eval/metrics.h"
#include "ttsspk/eval/report.h"
#include "ttsspk/eval/trials.h"
#include "ttsspk/features/manifest.h"
#include "ttsspk/features/mel.h"
#include "ttsspk/model/checkpoint.h"
#include "ttsspk/numerics/tape.h"
#include "ttsspk/text/vocab.h"

namespace ttsspk::cli {
namespace {

using Json = nlohmann::json;

void RequireOut(const fs::path& out) {
  if (out.empty()) throw UsageError("--out is required");
  fs::create_directories(out);
}

void RequireFile(const fs::path& p, const std::string& what) {
  if (p.empty()) throw UsageError(what + " is required");
  if (!fs::exists(p)) throw InputError(what + " not found: " + p.string());
}

void WriteJsonLines(const fs::path& path, const std::vector<Json>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) os << r.dump() << '\n';
  io::WriteFileAtomic(path, os.str());
}

std::vector<Json> ReadJsonLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Json> rows;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

fs::path FeaturePath(const fs::path& prepared, const std::string& utt_id) {
  if (utt_id.find_first_of("/\\") != std::string::npos || utt_id == "." || utt_id == "..") {
    throw InputError("utt_id '" + utt_id + "' cannot name a cache file");
  }
  return prepared / "features" / (utt_id + ".melf");
}

num::Tensor MelTensor(const feat::MelSpectrogram& m) {
  return num::Tensor::Matrix(m.num_frames, m.num_bins, m.values);
}

RunConfig PreparedConfig(const fs::path& prepared) {
  const fs::path p = prepared / "prepare.json";
  RequireFile(p, "prepared directory marker");
  try {
    return RunConfigFromJson(Json::parse(io::ReadTextFile(p)).at("config"));
  } catch (const Json::exception& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

// Checks that feature and text settings match what the cache was built with.
void CheckPreparedCompatible(const RunConfig& config, const fs::path& prepared) {
  const RunConfig p = PreparedConfig(prepared);
  if (FeatureConfigToJson(p.features) != FeatureConfigToJson(config.features)) {
    throw ConfigError("feature settings differ from those used to prepare " + prepared.string());
  }
  if (RunConfigToJson(p)["text"] != RunConfigToJson(config)["text"]) {
    throw ConfigError("text settings differ from those used to prepare " + prepared.string());
  }
}

}  // namespace

Json ConfigEcho(const RunConfig& c) {
  Json j = RunConfigToJson(c);
  j.erase("paths");
  return j;
}

void Synthgen(const SynthgenOptions& o) {
  RequireOut(o.out);
  if (o.corpus.n_speakers < 2) throw UsageError("synthgen needs at least 2 speakers (got " +
                                                std::to_string(o.corpus.n_speakers) + ")");
  const feat::TokenInventory inv = feat::TokenInventory::Default();
  const feat::SyntheticCorpus corpus = feat::GenerateCorpus(o.corpus, inv);
  feat::WriteCorpus(corpus, inv, o.out, o.features);
  LogInfo("synthgen: " + std::to_string(corpus.utterances.size()) + " utterances from " +
          std::to_string(corpus.speakers.size()) + " speakers in " + o.out.string());
}

void Prepare(const PrepareOptions& o) {
  RequireFile(o.manifest, "--manifest");
  o.config.Validate();
  RequireOut(o.out);
  fs::create_directories(o.out / "features");
  const feat::Manifest manifest = feat::ReadManifest(o.manifest);
  const TextConfig& tc = o.config.text;

  std::vector<text::RawTokens> raws;
  std::vector<std::vector<std::string>> symbols;
  for (const auto& r : manifest.records) {
    text::RawTokens raw;
    try {
      raw = text::ReadTokenFile(manifest.Resolve(r.text_source), tc.tokenization);
    } catch (const Error& e) {
      throw InputError("utterance " + r.utt_id + ": " + e.what());
    }
    if (raw.kind != tc.mode) {
      throw InputError("utterance " + r.utt_id + ": expected " + text::TokenKindString(tc.mode) +
                       " input but " + r.text_source + " is " + text::TokenKindString(raw.kind));
    }
    if (raw.kind == text::TokenKind::kAlignment && raw.frame_sr != tc.frame_sr) {
      throw InputError("utterance " + r.utt_id + ": alignment has sr=" + std::to_string(raw.frame_sr) +
                       " but text.frame_sr is " + std::to_string(tc.frame_sr));
    }
    symbols.push_back(raw.symbols);
    raws.push_back(std::move(raw));
  }
  const text::Vocabulary vocab = text::BuildVocab(symbols);

  std::vector<text::TokenSequence> seqs;
  std::vector<Json> utts, labels;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    feat::MelSpectrogram mel;
    try {
      mel = feat::LogMel(feat::LoadAudio(manifest, r, o.config.features), o.config.features);
    } catch (const Error& e) {
      throw InputError("utterance " + r.utt_id + ": " + e.what());
    }
    const bool alignment = raws[i].kind == text::TokenKind::kAlignment;
    text::TokenSequence seq = text::EncodeTokens(r.utt_id, raws[i], vocab, !alignment);
    if (alignment) {
      seq = text::UpsampleAlignment(seq, tc.target_sr);
      const text::AlignmentFit fit = text::FitAlignment(seq, mel.num_frames, tc.align_tolerance);
      seq.ids.resize(fit.num_labels);
      mel.num_frames = fit.num_frames;
      mel.values.resize(fit.num_frames * mel.num_bins);
    }
    feat::WriteMelFile(FeaturePath(o.out, r.utt_id), mel);
    seqs.push_back(std::move(seq));
    utts.push_back({{"utt_id", r.utt_id}, {"subset", feat::SubsetString(r.subset)}});
    labels.push_back({{"utt_id", r.utt_id}, {"speaker_id", r.speaker_id}, {"gender", r.gender}});
  }
  text::WriteTokenCache(o.out / "tokens.jsonl", seqs);
  text::WriteVocab(o.out / "vocab.txt", vocab);
  WriteJsonLines(o.out / "utterances.jsonl", utts);
  WriteJsonLines(o.out / "labels.jsonl", labels);
  Json info;
  info["config"] = RunConfigToJson(o.config);
  info["config"].erase("paths");
  info["num_utterances"] = manifest.records.size();
  info["vocab_size"] = vocab.size();
  io::WriteFileAtomic(o.out / "prepare.json", info.dump(2) + "\n");
  LogInfo("prepare: " + std::to_string(manifest.records.size()) + " utterances, vocabulary of " +
          std::to_string(vocab.size()));
}

std::vector<PreparedUtterance> ReadPreparedUtterances(const fs::path& prepared) {
  std::vector<PreparedUtterance> out;
  for (const auto& j : ReadJsonLines(prepared / "utterances.jsonl")) {
    try {
      out.push_back({j.at("utt_id").get<std::string>(), feat::ParseSubset(j.at("subset").get<std::string>())});
    } catch (const Json::exception& e) {
      throw InputError("utterances.jsonl: " + std::string(e.what()));
    }
  }
  return out;
}

std::vector<UtteranceLabel> ReadLabels(const fs::path& prepared) {
  std::vector<UtteranceLabel> out;
  for (const auto& j : ReadJsonLines(prepared / "labels.jsonl")) {
    try {
      out.push_back({j.at("utt_id").get<std::string>(), j.at("speaker_id").get<std::string>(),
                     j.at("gender").get<std::string>()});
    } catch (const Json::exception& e) {
      throw InputError("labels.jsonl: " + std::string(e.what()));
    }
  }
  return out;
}

feat::MelSpectrogram ReadPreparedFeatures(const fs::path& prepared, const std::string& utt_id) {
  const fs::path p = FeaturePath(prepared, utt_id);
  if (!fs::exists(p)) throw InputError("no cached features for " + utt_id + " (" + p.string() + ")");
  return feat::ReadMelFile(p);
}

TrainSummary Train(const TrainCommandOptions& o) {
  o.config.Validate();
  RequireOut(o.out);
  CheckPreparedCompatible(o.config, o.prepared);
  const text::Vocabulary vocab = text::ReadVocab(o.prepared / "vocab.txt");
  std::map<std::string, text::TokenSequence> tokens;
  for (auto& s : text::ReadTokenCache(o.prepared / "tokens.jsonl")) tokens.emplace(s.utt_id, std::move(s));

  std::vector<model::TrainingExample> data;
  for (const auto& u : ReadPreparedUtterances(o.prepared)) {
    if (u.subset != feat::Subset::kTrain) continue;
    auto it = tokens.find(u.utt_id);
    if (it == tokens.end()) throw InputError("no tokens for utterance " + u.utt_id);
    model::TrainingExample ex;
    ex.utt_id = u.utt_id;
    ex.ids = it->second.ids;
    ex.mel = MelTensor(ReadPreparedFeatures(o.prepared, u.utt_id));
    data.push_back(std::move(ex));
  }
  if (data.empty()) throw InputError("no training utterances in " + o.prepared.string());

  model::ModelConfig mc = o.config.model;
  mc.vocab_size = vocab.size();
  Json speakers = Json::array();
  if (mc.spk_loss_weight > 0.0) {
    std::map<std::string, std::string> speaker_of;
    for (const auto& l : ReadLabels(o.prepared)) speaker_of[l.utt_id] = l.speaker_id;
    std::set<std::string> ids;
    for (const auto& ex : data) {
      auto it = speaker_of.find(ex.utt_id);
      if (it == speaker_of.end()) throw InputError("no speaker label for " + ex.utt_id);
      ids.insert(it->second);
    }
    const std::vector<std::string> sorted(ids.begin(), ids.end());
    if (mc.num_speakers == 0) mc.num_speakers = sorted.size();
    if (mc.num_speakers != sorted.size()) {
      throw ConfigError("model.num_speakers is " + std::to_string(mc.num_speakers) + " but the training set has " +
                        std::to_string(sorted.size()) + " speakers");
    }
    for (auto& ex : data) {
      ex.speaker = static_cast<std::size_t>(
          std::lower_bound(sorted.begin(), sorted.end(), speaker_of.at(ex.utt_id)) - sorted.begin());
    }
    speakers = sorted;
  } else {
    mc.num_speakers = 0;
  }

  model::TrainOptions to;
  to.epochs = o.config.train.epochs;
  to.batch_size = o.config.train.batch;
  to.learning_rate = o.config.train.lr;
  to.seed = o.config.train.seed;
  to.max_steps = o.config.train.max_steps;
  to.clip_norm = o.config.train.clip_norm;
  to.out_dir = o.out;
  RunConfig echo = o.config;
  echo.model = mc;
  to.metadata = {{"run_config", ConfigEcho(echo)}, {"speakers", speakers}};

  std::unique_ptr<model::TtsModel> owned;
  std::optional<model::Checkpoint> resumed;
  const fs::path last = o.out / "last.ckpt";
  if (o.resume && fs::exists(last)) {
    resumed = model::LoadCheckpoint(last);
    // The step budget may grow on resume; nothing else may change.
    auto budgetless = [](Json j) {
      if (j.contains("train")) {
        j["train"].erase("epochs");
        j["train"].erase("max_steps");
      }
      return j;
    };
    if (budgetless(resumed->metadata.value("run_config", Json())) != budgetless(to.metadata["run_config"])) {
      throw ConfigError("cannot resume: " + last.string() + " was written with a different configuration");
    }
    if (!resumed->adam || !resumed->metadata.contains("train_state")) {
      throw InputError(last.string() + " has no optimizer state to resume from");
    }
  } else {
    owned = std::make_unique<model::TtsModel>(mc, o.config.train.seed);
  }
  model::TtsModel& m = resumed ? *resumed->model : *owned;
  model::Trainer trainer(m, std::move(data), to);
  if (resumed) {
    const auto state = model::TrainStateFromJson(resumed->metadata.at("train_state"));
    LogInfo("train: resuming at step " + std::to_string(state.step));
    trainer.Resume(*resumed->adam, state);
  }
  TrainSummary summary;
  summary.steps = trainer.Run();
  summary.checkpoint = o.out / "model.ckpt";
  if (!summary.steps.empty()) {
    LogInfo("train: " + std::to_string(trainer.state().step) + " steps, final loss " +
            std::to_string(summary.steps.back().loss.total));
  }
  return summary;
}

void Extract(const ExtractOptions& o) {
  RequireFile(o.checkpoint, "--checkpoint");
  RequireOut(o.out);
  const model::Checkpoint ck = model::LoadCheckpoint(o.checkpoint);
  std::map<std::string, UtteranceLabel> labels;
  for (auto& l : ReadLabels(o.prepared)) labels.emplace(l.utt_id, l);
  backend::EmbeddingSet train, eval;
  for (const auto& u : ReadPreparedUtterances(o.prepared)) {
    auto it = labels.find(u.utt_id);
    if (it == labels.end()) throw InputError("no label for utterance " + u.utt_id);
    feat::UtteranceRecord rec;
    rec.utt_id = u.utt_id;
    rec.speaker_id = it->second.speaker_id;
    rec.gender = it->second.gender;
    auto e = backend::ExtractEmbedding(*ck.model, rec, ReadPreparedFeatures(o.prepared, u.utt_id));
    (u.subset == feat::Subset::kTrain ? train : eval).records.push_back(std::move(e));
  }
  backend::WriteEmbeddings(o.out / "embeddings_train.jsonl", train);
  backend::WriteEmbeddings(o.out / "embeddings_eval.jsonl", eval);
  LogInfo("extract: " + std::to_string(train.size()) + " train and " + std::to_string(eval.size()) +
          " eval embeddings");
}

void Backend(const BackendCommandOptions& o) {
  RequireFile(o.embeddings, "--embeddings");
  RequireOut(o.out);
  const backend::BackendFit fit = backend::FitBackend(backend::ReadEmbeddings(o.embeddings), o.config);
  backend::WriteBackend(o.out / "backend.json", fit.model);
  Json info = {{"lda_dim", fit.lda_dim}, {"em_log_likelihood", fit.em_log_likelihood},
               {"config", backend::BackendConfigToJson(o.config)}};
  io::WriteFileAtomic(o.out / "backend_fit.json", info.dump(2) + "\n");
}

Json Eval(const EvalOptions& o) {
  RequireFile(o.backend, "--backend");
  RequireFile(o.embeddings, "--embeddings");
  RequireOut(o.out);
  const backend::BackendModel model = backend::ReadBackend(o.backend);
  const backend::EmbeddingSet emb = backend::ReadEmbeddings(o.embeddings);
  std::vector<eval::TrialUtterance> utts;
  for (const auto& r : emb.records) {
    if (!r.speaker_id) throw InputError("eval embedding " + r.utt_id + " has no speaker_id");
    utts.push_back({r.utt_id, *r.speaker_id, r.gender});
  }
  const auto trials = eval::MakeTrials(utts);
  const std::size_t n_target = eval::CountTargets(trials);
  if (n_target == 0) throw InputError("eval: no target trials (" + std::to_string(trials.size()) + " trials)");
  if (n_target == trials.size()) throw InputError("eval: no non-target trials");
  const auto scores = eval::ScoreTrials(model, emb, trials);
  eval::WriteTrials(o.out / "trials.txt", trials);
  eval::WriteScores(o.out / "scores.txt", trials, scores);
  std::vector<bool> labels;
  labels.reserve(trials.size());
  for (const auto& t : trials) labels.push_back(t.is_target);
  eval::ReportInputs in;
  in.metrics = eval::ComputeMetrics(scores, labels);
  in.n_trials = trials.size();
  in.n_target = n_target;
  in.config = o.config;
  in.checkpoint_id = o.checkpoint.empty() ? "" : model::CheckpointId(o.checkpoint);
  const Json report = eval::MakeReport(in);
  eval::WriteReport(o.out / "report.json", report);
  LogInfo("eval: " + std::to_string(trials.size()) + " trials, EER " +
          std::to_string(report["eer_percent"].get<double>()) + "%, minDCF " +
          std::to_string(in.metrics.min_dcf));
  return report;
}

Json RunPipeline(const RunConfig& config, const fs::path& prepared, const fs::path& out) {
  RequireOut(out);
  const TrainSummary t = Train({config, prepared, out / "train", false});
  Extract({t.checkpoint, prepared, out / "embeddings"});
  Backend({out / "embeddings" / "embeddings_train.jsonl", config.backend, out / "backend"});
  return Eval({out / "backend" / "backend.json", out / "embeddings" / "embeddings_eval.jsonl",
               t.checkpoint, ConfigEcho(config), out / "eval"});
}

std::vector<SweepRow> Sweep(const SweepOptions& o) {
  if (o.param.empty()) throw UsageError("--param is required");
  if (o.values.empty()) throw UsageError("--values needs at least one value");
  RequireOut(o.out);
  std::vector<SweepRow> rows;
  Json table = Json::array();
  std::ostringstream tsv;
  tsv << o.param << "\tseed\teer_percent\tmin_dcf\n";
  for (std::size_t i = 0; i < o.values.size(); ++i) {
    RunConfig c = WithSetting(o.config, o.param, o.values[i]);
    c.train.seed = o.config.train.seed + i;
    LogInfo("sweep: " + o.param + "=" + o.values[i] + " (seed " + std::to_string(c.train.seed) + ")");
    const Json report = RunPipeline(c, o.prepared, o.out / ("row" + std::to_string(i)));
    SweepRow row{o.values[i], c.train.seed, report["eer_percent"].get<double>(),
                 report["min_dcf"].get<double>()};
    table.push_back({{"value", row.value}, {"seed", row.seed}, {"eer_percent", row.eer_percent},
                     {"min_dcf", row.min_dcf}});
    tsv << row.value << '\t' << row.seed << '\t' << row.eer_percent << '\t' << row.min_dcf << '\n';
    rows.push_back(row);
  }
  io::WriteFileAtomic(o.out / "sweep.json", Json{{"param", o.param}, {"rows", table}}.dump(2) + "\n");
  io::WriteFileAtomic(o.out / "sweep.tsv", tsv.str());
  return rows;
}

void Synthesize(const SynthesizeOptions& o) {
  RequireFile(o.checkpoint, "--checkpoint");
  if (o.text.empty()) throw UsageError("--text is required");
  RequireOut(o.out);
  const model::Checkpoint ck = model::LoadCheckpoint(o.checkpoint);
  const RunConfig config = RunConfigFromJson(ck.metadata.at("run_config"));
  if (config.text.mode != text::TokenKind::kTranscript) {
    throw UsageError("synthesize needs a model trained on transcripts");
  }
  const text::Vocabulary vocab = text::ReadVocab(o.prepared / "vocab.txt");
  const fs::path text_file = o.out / "synth_text.txt";
  io::WriteFileAtomic(text_file, o.text + "\n");
  const auto raw = text::ReadTokenFile(text_file, config.text.tokenization);
  const auto seq = text::EncodeTokens("synth", raw, vocab, true);

  const feat::MelSpectrogram ref = ReadPreparedFeatures(o.prepared, o.reference_utt);
  num::NoGradScope no_grad;
  const num::Tensor e = ck.model->EncodeSpeaker(ck.model->Normalize(MelTensor(ref)));
  const num::Tensor frames = ck.model->Denormalize(ck.model->Synthesize(seq.ids, e, o.max_steps));
  feat::MelSpectrogram out;
  out.num_frames = frames.dim(0);
  out.num_bins = frames.dim(1);
  out.frame_shift = config.features.frame_shift();
  out.values.assign(frames.data().begin(), frames.data().end());
  feat::WriteMelFile(o.out / "synth.melf", out);
  LogInfo("synthesize: " + std::to_string(out.num_frames) + " frames");
}

}  // namespace ttsspk::cli
