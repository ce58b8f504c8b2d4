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

#include "ttsspk/backend/extract.h"

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::backend {

EmbeddingRecord ExtractEmbedding(const model::TtsModel& model, const feat::UtteranceRecord& record,
                                 const feat::MelSpectrogram& mel) {
  if (mel.num_bins != model.config().mel_dim) {
    throw DimensionError("features of " + record.utt_id + " have " + std::to_string(mel.num_bins) +
                         " bins, model expects " + std::to_string(model.config().mel_dim));
  }
  num::NoGradScope no_grad;
  const num::Tensor raw = num::Tensor::Matrix(mel.num_frames, mel.num_bins, mel.values);
  const num::Tensor e = model.EncodeSpeaker(model.Normalize(raw));
  EmbeddingRecord r;
  r.utt_id = record.utt_id;
  r.speaker_id = record.speaker_id;
  r.gender = record.gender;
  r.vector = Eigen::Map<const Eigen::VectorXd>(e.data().data(), static_cast<Eigen::Index>(e.size()));
  return r;
}

}  // namespace ttsspk::backend
