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

#ifndef TTSSPK_BACKEND_EXTRACT_H_
#define TTSSPK_BACKEND_EXTRACT_H_

#include "ttsspk/backend/embeddings.h"
#include "ttsspk/features/manifest.h"
#include "ttsspk/features/mel.h"
#include "ttsspk/model/tts_model.h"

namespace ttsspk::backend {

// Runs the speaker encoder on raw log-mel features; the model applies its
// own feature normalization.
EmbeddingRecord ExtractEmbedding(const model::TtsModel& model, const feat::UtteranceRecord& record,
                                 const feat::MelSpectrogram& mel);

}  // namespace ttsspk::backend

#endif  // TTSSPK_BACKEND_EXTRACT_H_
