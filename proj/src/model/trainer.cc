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

#include "ttsspk/model/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"
#include "ttsspk/common/log.h"
#include "ttsspk/model/checkpoint.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::model {

nlohmann::json TrainStateToJson(const TrainState& s) {
  return {{"step", s.step}, {"epoch", s.epoch}, {"batch_index", s.batch_index}};
}

TrainState TrainStateFromJson(const nlohmann::json& j) {
  try {
    TrainState s;
    s.step = j.at("step").get<std::int64_t>();
    s.epoch = j.at("epoch").get<int>();
    s.batch_index = j.at("batch_index").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad train_state: ") + e.what());
  }
}

nlohmann::json StepLogToJson(const StepLog& s) {
  return {{"step", s.step},         {"l1", s.loss.l1},       {"l2", s.loss.l2},
          {"stop_bce", s.loss.stop_bce}, {"l_spk", s.loss.l_spk}, {"total", s.loss.total}};
}

void FeatureStats(const std::vector<TrainingExample>& data, std::vector<double>& mean,
                  std::vector<double>& stddev) {
  if (data.empty()) throw InputError("no training examples");
  const std::size_t d = data.front().mel.dim(1);
  mean.assign(d, 0.0);
  stddev.assign(d, 0.0);
  std::size_t frames = 0;
  for (const auto& ex : data) {
    const auto v = ex.mel.data();
    for (std::size_t i = 0; i < v.size(); ++i) mean[i % d] += v[i];
    frames += ex.mel.dim(0);
  }
  for (double& m : mean) m /= static_cast<double>(frames);
  for (const auto& ex : data) {
    const auto v = ex.mel.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = v[i] - mean[i % d];
      stddev[i % d] += r * r;
    }
  }
  for (double& s : stddev) s = std::max(1e-3, std::sqrt(s / static_cast<double>(frames)));
}

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Trainer::Trainer(TtsModel& model, std::vector<TrainingExample> data, TrainOptions options)
    : model_(model), data_(std::move(data)), options_(std::move(options)) {
  if (data_.empty()) throw InputError("training set is empty");
  if (options_.batch_size < 1) throw ConfigError("train.batch must be >= 1");
  if (options_.epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (!(options_.learning_rate > 0.0)) throw ConfigError("train.lr must be positive");
  if (options_.max_steps < 0) throw ConfigError("train.max_steps must be >= 0");
  const ModelConfig& cfg = model_.config();
  for (const auto& ex : data_) {
    if (ex.mel.rank() != 2 || ex.mel.dim(1) != cfg.mel_dim) {
      throw DimensionError(ex.utt_id + ": features " + num::ShapeString(ex.mel.shape()) +
                           " do not have " + std::to_string(cfg.mel_dim) + " bands");
    }
    if (cfg.spk_loss_weight > 0.0 && ex.speaker >= cfg.num_speakers) {
      throw InputError(ex.utt_id + ": speaker index out of range for the classifier");
    }
  }
  if (cfg.spk_loss_weight > 0.0 && !model_.has_classifier()) {
    throw ConfigError("spk_loss_weight > 0 needs model.num_speakers > 0");
  }
  std::vector<double> mean, stddev;
  FeatureStats(data_, mean, stddev);
  model_.SetFeatureStats(mean, stddev);
  num::AdamHyper hyper;
  hyper.learning_rate = options_.learning_rate;
  adam_ = num::AdamState::For(model_.params().Trainable(), hyper);
}

void Trainer::Resume(num::AdamState adam, TrainState state) {
  if (adam.first_moment.size() != model_.params().Trainable().size()) {
    throw InputError("optimizer state does not match the model");
  }
  adam.hyper.learning_rate = options_.learning_rate;
  adam_ = std::move(adam);
  state_ = state;
  resumed_ = true;
}

JointLoss Trainer::UtteranceLoss(const TrainingExample& ex, std::int64_t step) const {
  const ModelConfig& cfg = model_.config();
  const num::Tensor target = model_.Normalize(ex.mel);
  const TeacherForcedOutput fw = model_.ForwardTeacherForced(ex.ids, target);
  const TtsLoss tts = ComputeTtsLoss(fw.pred, target, fw.stop_logits);
  num::Tensor l_spk;
  if (cfg.spk_loss_weight > 0.0) {
    l_spk = AngularSoftmaxLoss(fw.embedding, model_.params().Get("spk/proj"), ex.speaker,
                               cfg.angular_margin, AnnealedLambda(step));
  }
  return CombineLosses(tts, l_spk, cfg.spk_loss_weight);
}

void Trainer::SaveCheckpointTo(const std::filesystem::path& path) const {
  nlohmann::json meta = options_.metadata;
  meta["train_state"] = TrainStateToJson(state_);
  meta["train_seed"] = options_.seed;
  SaveCheckpoint(path, model_, meta, &adam_);
}

std::vector<StepLog> Trainer::Run() {
  const bool write = !options_.out_dir.empty();
  const std::filesystem::path log_path = options_.out_dir / "loss.jsonl";
  std::ofstream log;
  if (write) {
    std::filesystem::create_directories(options_.out_dir);
    if (resumed_) {
      // Drop log lines written after the checkpoint being resumed.
      std::vector<std::string> kept;
      std::ifstream prev(log_path);
      std::string line;
      while (static_cast<std::int64_t>(kept.size()) < state_.step && std::getline(prev, line)) {
        kept.push_back(line);
      }
      prev.close();
      log.open(log_path, std::ios::trunc);
      for (const auto& l : kept) log << l << "\n";
    } else {
      log.open(log_path, std::ios::trunc);
    }
    if (!log) throw InputError("cannot write " + log_path.string());
  }

  auto params = model_.params().Trainable();
  std::vector<StepLog> history;
  const std::size_t n = data_.size(), bs = options_.batch_size;
  const std::size_t batches = (n + bs - 1) / bs;
  auto budget_left = [&] {
    return options_.max_steps == 0 || state_.step < options_.max_steps;
  };

  while (state_.epoch < options_.epochs && budget_left()) {
    const std::vector<std::size_t> order = EpochOrder(n, options_.seed, state_.epoch);
    while (state_.batch_index < batches && budget_left()) {
      const std::size_t begin = state_.batch_index * bs, end = std::min(n, begin + bs);
      const double inv = 1.0 / static_cast<double>(end - begin);
      JointLossValues mean;
      num::ZeroGradients(params);
      for (std::size_t i = begin; i < end; ++i) {
        num::Tape tape;
        num::TapeScope scope(tape);
        JointLoss loss = UtteranceLoss(data_[order[i]], state_.step);
        tape.Backward(num::Scale(loss.total, inv));
        mean.l1 += inv * loss.values.l1;
        mean.l2 += inv * loss.values.l2;
        mean.stop_bce += inv * loss.values.stop_bce;
        mean.l_spk += inv * loss.values.l_spk;
        mean.total += inv * loss.values.total;
      }
      num::ClipGradientNorm(params, options_.clip_norm);
      num::AdamStep(params, adam_);
      ++state_.step;
      ++state_.batch_index;
      StepLog entry{state_.step, mean};
      history.push_back(entry);
      if (write) log << StepLogToJson(entry).dump() << "\n" << std::flush;
      if (options_.on_step) options_.on_step(state_.step, mean);
    }
    if (state_.batch_index >= batches) {
      ++state_.epoch;
      state_.batch_index = 0;
      if (write) SaveCheckpointTo(options_.out_dir / "last.ckpt");
    }
  }
  if (write) {
    SaveCheckpointTo(options_.out_dir / "last.ckpt");
    SaveCheckpointTo(options_.out_dir / "model.ckpt");
  }
  num::ZeroGradients(params);
  return history;
}

}  // namespace ttsspk::model
