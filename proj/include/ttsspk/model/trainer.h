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

#ifndef TTSSPK_MODEL_TRAINER_H_
#define TTSSPK_MODEL_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttsspk/model/losses.h"
#include "ttsspk/model/tts_model.h"
#include "ttsspk/numerics/adam.h"

namespace ttsspk::model {

struct TrainingExample {
  std::string utt_id;
  std::vector<std::size_t> ids;
  num::Tensor mel;  // raw log-mel [T x D_a]
  // Index into the training speakers; only read when the speaker loss is on.
  std::size_t speaker = 0;
};

struct TrainOptions {
  int epochs = 10;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  // Stop after this many optimizer steps; 0 means no limit.
  std::int64_t max_steps = 0;
  double clip_norm = 1.0;
  // Receives loss.jsonl, last.ckpt (each epoch) and model.ckpt (at the end).
  // Empty disables all file output.
  std::filesystem::path out_dir;
  // Stored in every checkpoint header next to the training state.
  nlohmann::json metadata = nlohmann::json::object();
  std::function<void(std::int64_t step, const JointLossValues&)> on_step;
};

struct TrainState {
  std::int64_t step = 0;
  int epoch = 0;
  std::size_t batch_index = 0;  // next batch within `epoch`
};

nlohmann::json TrainStateToJson(const TrainState& s);
TrainState TrainStateFromJson(const nlohmann::json& j);

struct StepLog {
  std::int64_t step = 0;
  JointLossValues loss;
};

nlohmann::json StepLogToJson(const StepLog& s);

// Per-dimension mean and standard deviation over all frames (std floored
// at 1e-3).
void FeatureStats(const std::vector<TrainingExample>& data, std::vector<double>& mean,
                  std::vector<double>& stddev);

// Order of example indices for one epoch; a pure function of (seed, epoch).
std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, int epoch);

class Trainer {
 public:
  // Fresh run: feature statistics are computed from `data` and stored in
  // the model.
  Trainer(TtsModel& model, std::vector<TrainingExample> data, TrainOptions options);

  // Continue from a saved optimizer state and position instead.
  void Resume(num::AdamState adam, TrainState state);

  // Runs until the epoch budget or max_steps is exhausted. A non-finite loss
  // or gradient raises NumericError; the last per-epoch checkpoint stays.
  std::vector<StepLog> Run();

  // Joint loss of one utterance, recorded on the current tape.
  JointLoss UtteranceLoss(const TrainingExample& ex, std::int64_t step) const;

  const TrainState& state() const { return state_; }
  const num::AdamState& adam() const { return adam_; }

 private:
  void SaveCheckpointTo(const std::filesystem::path& path) const;

  TtsModel& model_;
  std::vector<TrainingExample> data_;
  std::vector<num::Tensor> normalized_;
  TrainOptions options_;
  num::AdamState adam_;
  TrainState state_;
  bool resumed_ = false;
};

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_TRAINER_H_
