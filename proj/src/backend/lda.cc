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

#include "ttsspk/backend/lda.h"

#include <map>
#include <string>

#include "ttsspk/common/error.h"

namespace ttsspk::backend {

Eigen::VectorXd LdaModel::Project(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw DimensionError("LDA input has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(mean.size()));
  }
  return projection.transpose() * (x - mean);
}

Scatter ComputeScatter(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels) {
  if (x.empty() || x.size() != labels.size()) {
    throw InputError("scatter needs one label per sample and at least one sample");
  }
  const Eigen::Index d = x.front().size();
  std::map<int, std::pair<Eigen::VectorXd, int>> classes;
  Scatter s;
  s.mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw DimensionError("samples of unequal dimension");
    auto [it, fresh] = classes.try_emplace(labels[i], Eigen::VectorXd::Zero(d), 0);
    it->second.first += x[i];
    ++it->second.second;
    s.mean += x[i];
  }
  const double n = static_cast<double>(x.size());
  s.mean /= n;
  for (auto& [label, acc] : classes) acc.first /= acc.second;
  s.within = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::VectorXd r = x[i] - classes.at(labels[i]).first;
    s.within.noalias() += r * r.transpose();
  }
  s.within /= n;
  s.between = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [label, acc] : classes) {
    const Eigen::VectorXd r = acc.first - s.mean;
    s.between.noalias() += acc.second * r * r.transpose();
  }
  s.between /= n;
  return s;
}

Eigen::MatrixXd Ridge(const Eigen::MatrixXd& s) {
  Eigen::MatrixXd out = s;
  out.diagonal().array() += 1e-6 * s.trace() / static_cast<double>(s.rows());
  return out;
}

LdaModel FitLda(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels,
                int d_out) {
  std::map<int, int> counts;
  for (int l : labels) ++counts[l];
  if (counts.size() < 2) throw InputError("LDA needs at least 2 classes");
  for (const auto& [label, c] : counts) {
    if (c < 2) throw InputError("LDA class " + std::to_string(label) + " has fewer than 2 samples");
  }
  const int max_dim = static_cast<int>(counts.size()) - 1;
  if (d_out < 1 || d_out > max_dim || d_out > x.front().size()) {
    throw ConfigError("LDA dimension " + std::to_string(d_out) + " outside [1, " +
                      std::to_string(std::min<Eigen::Index>(max_dim, x.front().size())) + "]");
  }
  const Scatter s = ComputeScatter(x, labels);
  const Eigen::MatrixXd sw = Ridge(s.within);
  Eigen::LLT<Eigen::MatrixXd> chol(sw);
  if (chol.info() != Eigen::Success || !(sw.trace() > 0.0)) {
    throw NumericError("within-class scatter is singular after regularization");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.between, sw);
  if (eig.info() != Eigen::Success) throw NumericError("LDA eigen decomposition failed");

  const Eigen::Index d = x.front().size();
  LdaModel m;
  m.mean = s.mean;
  m.projection.resize(d, d_out);
  // Eigenvalues come back ascending.
  for (int k = 0; k < d_out; ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    m.projection.col(k) = v;
  }
  return m;
}

}  // namespace ttsspk::backend
