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

// Command-line entry point. Exit codes: 0 success, 1 usage or config error,
// 2 data error, 3 numeric failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttsspk/cli/commands.h"
#include "ttsspk/cli/run_config.h"
#include "ttsspk/common/error.h"
#include "ttsspk/common/log.h"
#include "ttsspk/eval/report.h"

namespace {

using namespace ttsspk;

cli::RunConfig ConfigOrDefault(const std::string& path) {
  cli::RunConfig c = path.empty() ? cli::RunConfig{} : cli::LoadRunConfig(path);
  c.Validate();
  return c;
}

std::string OrPath(const std::string& flag, const std::string& from_config, const char* name) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw UsageError(std::string(name) + " is required (flag or config paths section)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker embeddings learned through multi-speaker TTS reconstruction"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");

  std::string out, config_path, manifest, prepared, checkpoint, embeddings, backend_path;

  feat::CorpusOptions corpus;
  auto* synthgen = app.add_subcommand("synthgen", "Generate a synthetic multi-speaker corpus");
  synthgen->add_option("--speakers", corpus.n_speakers, "Number of speakers")->capture_default_str();
  synthgen->add_option("--utts", corpus.utts_per_speaker, "Utterances per speaker")->capture_default_str();
  synthgen->add_option("--eval-speakers", corpus.n_eval_speakers, "Eval speakers (0: a third)")->capture_default_str();
  synthgen->add_option("--min-tokens", corpus.min_tokens)->capture_default_str();
  synthgen->add_option("--max-tokens", corpus.max_tokens)->capture_default_str();
  synthgen->add_option("--seed", corpus.seed, "Random seed")->capture_default_str();
  synthgen->add_option("--config", config_path, "Run config (features section is used)");
  synthgen->add_option("--out", out, "Output directory")->required();

  auto* prepare = app.add_subcommand("prepare", "Compute feature and token caches");
  prepare->add_option("--manifest", manifest, "Manifest (JSON lines)");
  prepare->add_option("--config", config_path, "Run config");
  prepare->add_option("--out", out, "Prepared directory")->required();

  bool resume = false;
  auto* train = app.add_subcommand("train", "Train the TTS model and speaker encoder");
  train->add_option("--config", config_path, "Run config");
  train->add_option("--prepared", prepared, "Prepared directory");
  train->add_flag("--resume", resume, "Continue from <out>/last.ckpt");
  train->add_option("--out", out, "Training directory")->required();

  auto* extract = app.add_subcommand("extract", "Extract speaker embeddings");
  extract->add_option("--checkpoint", checkpoint)->required();
  extract->add_option("--prepared", prepared)->required();
  extract->add_option("--out", out)->required();

  auto* backend = app.add_subcommand("backend", "Fit preprocessing, LDA and PLDA");
  backend->add_option("--embeddings", embeddings, "Training embeddings")->required();
  backend->add_option("--config", config_path, "Run config (backend section is used)");
  backend->add_option("--out", out)->required();

  auto* eval = app.add_subcommand("eval", "Score same-gender trials and report EER / MinDCF");
  eval->add_option("--backend", backend_path, "backend.json")->required();
  eval->add_option("--embeddings", embeddings, "Eval embeddings")->required();
  eval->add_option("--checkpoint", checkpoint, "Checkpoint whose id goes into the report");
  eval->add_option("--config", config_path, "Run config echoed into the report");
  eval->add_option("--out", out)->required();

  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "Run the full pipeline for each value of one setting");
  sweep->add_option("--config", config_path, "Run config");
  sweep->add_option("--prepared", prepared, "Prepared directory");
  sweep->add_option("--param", param, "Setting, e.g. spk_loss_weight or train.lr")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',')->required();
  sweep->add_option("--out", out)->required();

  std::string reference, text;
  std::size_t max_steps = 400;
  auto* synth = app.add_subcommand("synthesize", "Decode log-mel frames for a text and a reference voice");
  synth->add_option("--checkpoint", checkpoint)->required();
  synth->add_option("--prepared", prepared)->required();
  synth->add_option("--reference", reference, "utt_id supplying the speaker embedding")->required();
  synth->add_option("--text", text)->required();
  synth->add_option("--max-steps", max_steps)->capture_default_str();
  synth->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  SetQuiet(quiet);

  try {
    if (*synthgen) {
      cli::Synthgen({corpus, ConfigOrDefault(config_path).features, out});
    } else if (*prepare) {
      const auto c = ConfigOrDefault(config_path);
      cli::Prepare({OrPath(manifest, c.paths.manifest, "--manifest"), c, out});
    } else if (*train) {
      const auto c = ConfigOrDefault(config_path);
      cli::Train({c, OrPath(prepared, c.paths.prepared, "--prepared"), out, resume});
    } else if (*extract) {
      cli::Extract({checkpoint, prepared, out});
    } else if (*backend) {
      cli::Backend({embeddings, ConfigOrDefault(config_path).backend, out});
    } else if (*eval) {
      const nlohmann::json echo =
          config_path.empty() ? nlohmann::json::object() : cli::ConfigEcho(ConfigOrDefault(config_path));
      const auto report = cli::Eval({backend_path, embeddings, checkpoint, echo, out});
      std::cout << "EER " << report["eer_percent"].get<double>() << "%  MinDCF "
                << report["min_dcf"].get<double>() << "  trials " << report["n_trials"] << "\n";
    } else if (*sweep) {
      const auto c = ConfigOrDefault(config_path);
      const auto rows = cli::Sweep({c, OrPath(prepared, c.paths.prepared, "--prepared"), param, values, out});
      std::cout << param << "\tseed\tEER%\tMinDCF\n";
      for (const auto& r : rows) {
        std::cout << r.value << '\t' << r.seed << '\t' << r.eer_percent << '\t' << r.min_dcf << '\n';
      }
    } else if (*synth) {
      cli::Synthesize({checkpoint, prepared, reference, text, max_steps, out});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
