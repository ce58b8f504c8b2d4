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

#ifndef TTSSPK_BACKEND_PIPELINE_H_
#define TTSSPK_BACKEND_PIPELINE_H_

#include <filesystem>

#include <Eigen/Dense>
#include "json.hpp"

#include "ttsspk/backend/embeddings.h"
#include "ttsspk/backend/lda.h"
#include "ttsspk/backend/plda.h"

namespace ttsspk::backend {

struct BackendConfig {
  bool preprocess = true;  // centering + length normalization
  int lda_dim = 0;         // 0 picks min(150, n_classes - 1, D_e - 1)
  int em_iters = 20;

  void Validate() const;
};
nlohmann::json BackendConfigToJson(const BackendConfig& c);
BackendConfig BackendConfigFromJson(const nlohmann::json& j);

int DefaultLdaDim(int n_classes, int embedding_dim);

// Fitted preprocessing, LDA and PLDA. When preprocessing is off `mean` is
// zero and vectors are not length-normalized.
class BackendModel {
 public:
  BackendModel() = default;
  BackendModel(bool preprocess, Eigen::VectorXd mean, LdaModel lda, PldaModel plda);

  // Preprocessed, LDA-projected vector.
  Eigen::VectorXd Transform(const Eigen::VectorXd& x) const;
  double Score(const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) const;

  bool preprocess() const { return preprocess_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const LdaModel& lda() const { return lda_; }
  const PldaModel& plda() const { return plda_; }

 private:
  bool preprocess_ = true;
  Eigen::VectorXd mean_;
  LdaModel lda_;
  PldaModel plda_;
  PldaScorer scorer_{PldaModel{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1),
                               Eigen::MatrixXd::Identity(1, 1)}};
};

struct BackendFit {
  BackendModel model;
  int lda_dim = 0;
  std::vector<double> em_log_likelihood;
};

// Fits on labelled training embeddings only.
BackendFit FitBackend(const EmbeddingSet& train, const BackendConfig& config);

// JSON {preprocess, mean, lda_mean, projection, mu, sigma_b, sigma_w};
// matrices are row-major arrays of rows.
void WriteBackend(const std::filesystem::path& path, const BackendModel& model);
BackendModel ReadBackend(const std::filesystem::path& path);

}  // namespace ttsspk::backend

#endif  // TTSSPK_BACKEND_PIPELINE_H_
