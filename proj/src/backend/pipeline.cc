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

#include "ttsspk/backend/pipeline.h"

#include <algorithm>
#include <set>

#include "ttsspk/common/binary_io.h"
#include "ttsspk/common/error.h"
#include "ttsspk/common/log.h"

namespace ttsspk::backend {
namespace {

nlohmann::json VectorJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json MatrixJson(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(VectorJson(m.row(r).transpose()));
  return rows;
}

Eigen::VectorXd VectorFrom(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd MatrixFrom(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != m) throw InputError("ragged matrix in backend file");
    for (Eigen::Index c = 0; c < m; ++c) out(r, c) = rows[r][c];
  }
  return out;
}

}  // namespace

void BackendConfig::Validate() const {
  if (lda_dim < 0) throw ConfigError("backend.lda_dim must be >= 0");
  if (em_iters < 0) throw ConfigError("backend.em_iters must be >= 0");
}

nlohmann::json BackendConfigToJson(const BackendConfig& c) {
  return {{"preprocess", c.preprocess}, {"lda_dim", c.lda_dim}, {"em_iters", c.em_iters}};
}

BackendConfig BackendConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("backend config must be an object");
  BackendConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "preprocess") {
        c.preprocess = value.get<bool>();
      } else if (key == "lda_dim") {
        c.lda_dim = value.get<int>();
      } else if (key == "em_iters") {
        c.em_iters = value.get<int>();
      } else {
        throw ConfigError("unknown backend key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("backend." + key + ": " + e.what());
    }
  }
  c.Validate();
  return c;
}

int DefaultLdaDim(int n_classes, int embedding_dim) {
  return std::max(1, std::min({150, n_classes - 1, embedding_dim - 1}));
}

BackendModel::BackendModel(bool preprocess, Eigen::VectorXd mean, LdaModel lda, PldaModel plda)
    : preprocess_(preprocess),
      mean_(std::move(mean)),
      lda_(std::move(lda)),
      plda_(std::move(plda)),
      scorer_(plda_) {
  if (mean_.size() != lda_.projection.rows() || lda_.mean.size() != mean_.size() ||
      plda_.mu.size() != lda_.projection.cols()) {
    throw DimensionError("backend components have inconsistent dimensions");
  }
}

Eigen::VectorXd BackendModel::Transform(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size()) {
    throw DimensionError("embedding dimension " + std::to_string(x.size()) +
                         " does not match backend dimension " + std::to_string(mean_.size()));
  }
  Eigen::VectorXd v = x;
  if (preprocess_) {
    v -= mean_;
    const double n = v.norm();
    if (!(n > 0.0)) throw NumericError("zero-norm embedding after centering");
    v /= n;
  }
  return lda_.Project(v);
}

double BackendModel::Score(const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) const {
  return scorer_.Score(Transform(enroll), Transform(test));
}

BackendFit FitBackend(const EmbeddingSet& train, const BackendConfig& config) {
  config.Validate();
  train.Validate();
  if (train.size() == 0) throw InputError("backend training set is empty");
  const std::vector<int> labels = train.SpeakerLabels();
  const int n_classes = static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
  const int dim = static_cast<int>(train.dim());

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  EmbeddingSet pre = train;
  if (config.preprocess) {
    mean = MeanVector(train);
    pre = CenterAndNormalize(train, mean);
  }
  std::vector<Eigen::VectorXd> x;
  x.reserve(pre.size());
  for (const auto& r : pre.records) x.push_back(r.vector);

  BackendFit fit;
  fit.lda_dim = config.lda_dim > 0 ? config.lda_dim : DefaultLdaDim(n_classes, dim);
  LdaModel lda = FitLda(x, labels, fit.lda_dim);
  std::vector<Eigen::VectorXd> y;
  y.reserve(x.size());
  for (const auto& v : x) y.push_back(lda.Project(v));
  PldaFitResult plda = FitPlda(y, labels, config.em_iters);
  LogInfo("backend: " + std::to_string(train.size()) + " embeddings, " +
          std::to_string(n_classes) + " speakers, LDA " + std::to_string(dim) + " -> " +
          std::to_string(fit.lda_dim));
  fit.em_log_likelihood = plda.log_likelihood;
  fit.model = BackendModel(config.preprocess, std::move(mean), std::move(lda), std::move(plda.model));
  return fit;
}

void WriteBackend(const std::filesystem::path& path, const BackendModel& model) {
  nlohmann::json j;
  j["preprocess"] = model.preprocess();
  j["mean"] = VectorJson(model.mean());
  j["lda_mean"] = VectorJson(model.lda().mean);
  j["projection"] = MatrixJson(model.lda().projection);
  j["mu"] = VectorJson(model.plda().mu);
  j["sigma_b"] = MatrixJson(model.plda().sigma_b);
  j["sigma_w"] = MatrixJson(model.plda().sigma_w);
  io::WriteFileAtomic(path, j.dump(2) + "\n");
}

BackendModel ReadBackend(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(io::ReadTextFile(path));
    LdaModel lda{VectorFrom(j.at("lda_mean")), MatrixFrom(j.at("projection"))};
    PldaModel plda{VectorFrom(j.at("mu")), MatrixFrom(j.at("sigma_b")), MatrixFrom(j.at("sigma_w"))};
    return BackendModel(j.at("preprocess").get<bool>(), VectorFrom(j.at("mean")), std::move(lda),
                        std::move(plda));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("backend file " + path.string() + ": " + e.what());
  }
}

}  // namespace ttsspk::backend
