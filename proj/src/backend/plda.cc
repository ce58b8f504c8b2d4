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

#include "ttsspk/backend/plda.h"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ttsspk/backend/lda.h"
#include "ttsspk/common/error.h"

namespace ttsspk::backend {
namespace {

struct ClassStats {
  int n = 0;
  Eigen::VectorXd sum;
  Eigen::MatrixXd outer;  // sum of x x^T
};

std::map<int, ClassStats> Accumulate(const std::vector<Eigen::VectorXd>& x,
                                     const std::vector<int>& labels) {
  if (x.empty() || x.size() != labels.size()) {
    throw InputError("PLDA needs one label per sample and at least one sample");
  }
  const Eigen::Index d = x.front().size();
  std::map<int, ClassStats> stats;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw DimensionError("PLDA samples of unequal dimension");
    auto& s = stats[labels[i]];
    if (s.n == 0) {
      s.sum = Eigen::VectorXd::Zero(d);
      s.outer = Eigen::MatrixXd::Zero(d, d);
    }
    ++s.n;
    s.sum += x[i];
    s.outer.noalias() += x[i] * x[i].transpose();
  }
  return stats;
}

double LogDet(const Eigen::MatrixXd& a, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericError(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

void CheckCovariances(const PldaModel& m, int iteration) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> w(m.sigma_w, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(m.sigma_b, Eigen::EigenvaluesOnly);
  if (!m.sigma_w.allFinite() || !m.sigma_b.allFinite() || w.eigenvalues().minCoeff() < 1e-10 ||
      b.eigenvalues().minCoeff() < -1e-10) {
    throw NumericError("PLDA covariance collapsed at EM iteration " + std::to_string(iteration));
  }
}

}  // namespace

double PldaLogLikelihood(const PldaModel& m, const std::vector<Eigen::VectorXd>& x,
                         const std::vector<int>& labels) {
  const auto stats = Accumulate(x, labels);
  const double d = static_cast<double>(m.mu.size());
  const Eigen::LLT<Eigen::MatrixXd> w(m.sigma_w);
  const double logdet_w = LogDet(m.sigma_w, "within-speaker covariance");
  double ll = 0.0;
  for (const auto& [label, s] : stats) {
    // Within the class, deviations from the class mean see sigma_w only;
    // the class mean sees sigma_w / n + sigma_b.
    const double n = s.n;
    const Eigen::VectorXd mean = s.sum / n;
    const Eigen::MatrixXd scatter = s.outer - n * mean * mean.transpose();
    const double within = w.solve(scatter).trace();
    const Eigen::MatrixXd c = m.sigma_w + n * m.sigma_b;
    const Eigen::VectorXd r = mean - m.mu;
    const double between = n * r.dot(Eigen::LLT<Eigen::MatrixXd>(c).solve(r));
    ll -= 0.5 * (n * d * std::log(2.0 * std::numbers::pi) + (n - 1.0) * logdet_w +
                 LogDet(c, "class covariance") + within + between);
  }
  return ll;
}

PldaFitResult FitPlda(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels,
                      int em_iters, bool ridge) {
  if (em_iters < 0) throw ConfigError("em_iters must be >= 0");
  const auto stats = Accumulate(x, labels);
  if (stats.size() < 2) throw InputError("PLDA needs at least 2 classes");
  for (const auto& [label, s] : stats) {
    if (s.n < 2) throw InputError("PLDA class " + std::to_string(label) + " has fewer than 2 samples");
  }
  const Eigen::Index d = x.front().size();
  const double n_total = static_cast<double>(x.size());
  const double n_classes = static_cast<double>(stats.size());

  PldaFitResult out;
  PldaModel& m = out.model;
  const Scatter sc = ComputeScatter(x, labels);
  m.mu = sc.mean;
  m.sigma_w = ridge ? Ridge(sc.within) : sc.within;
  m.sigma_b = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [label, s] : stats) {
    const Eigen::VectorXd r = s.sum / s.n - m.mu;
    m.sigma_b.noalias() += r * r.transpose();
  }
  m.sigma_b /= n_classes;
  CheckCovariances(m, 0);
  out.log_likelihood.push_back(PldaLogLikelihood(m, x, labels));

  for (int it = 1; it <= em_iters; ++it) {
    // E-step in a form that does not invert sigma_b:
    //   K = sigma_b (sigma_b + sigma_w / n)^-1
    //   E[y] = mu + K (mean - mu),  Cov[y] = sigma_b - K sigma_b.
    Eigen::VectorXd mu_acc = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd yy_acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd w_acc = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [label, s] : stats) {
      const double n = s.n;
      const Eigen::VectorXd mean = s.sum / n;
      const Eigen::MatrixXd c = m.sigma_b + m.sigma_w / n;
      const Eigen::MatrixXd k = Eigen::LLT<Eigen::MatrixXd>(c).solve(m.sigma_b).transpose();
      const Eigen::VectorXd ey = m.mu + k * (mean - m.mu);
      const Eigen::MatrixXd eyy = Symmetrize(m.sigma_b - k * m.sigma_b) + ey * ey.transpose();
      mu_acc += ey;
      yy_acc += eyy;
      w_acc += s.outer - s.sum * ey.transpose() - ey * s.sum.transpose() + n * eyy;
    }
    m.mu = mu_acc / n_classes;
    m.sigma_b = Symmetrize(yy_acc / n_classes - m.mu * m.mu.transpose());
    m.sigma_w = Symmetrize(w_acc / n_total);
    if (ridge) m.sigma_w = Ridge(m.sigma_w);
    CheckCovariances(m, it);
    out.log_likelihood.push_back(PldaLogLikelihood(m, x, labels));
  }
  return out;
}

PldaScorer::PldaScorer(const PldaModel& model) : mu_(model.mu) {
  const Eigen::Index d = model.mu.size();
  if (model.sigma_b.rows() != d || model.sigma_b.cols() != d || model.sigma_w.rows() != d ||
      model.sigma_w.cols() != d) {
    throw DimensionError("PLDA model with inconsistent dimensions");
  }
  // Joint covariance [[T, B], [B, T]] with T = B + W. Its inverse has
  // diagonal blocks A = (T - B T^-1 B)^-1 and off-diagonal -T^-1 B A.
  const Eigen::MatrixXd& b = model.sigma_b;
  const Eigen::MatrixXd t = b + model.sigma_w;
  const Eigen::LLT<Eigen::MatrixXd> t_llt(t);
  if (t_llt.info() != Eigen::Success) throw NumericError("PLDA total covariance is not positive definite");
  const Eigen::MatrixXd t_inv = t_llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd schur = Symmetrize(t - b * t_inv * b);
  const Eigen::MatrixXd a = Symmetrize(
      Eigen::LLT<Eigen::MatrixXd>(schur).solve(Eigen::MatrixXd::Identity(d, d)));
  q_ = Symmetrize(t_inv - a);
  p_ = Symmetrize(t_inv * b * a);
  offset_ = 0.5 * LogDet(t, "PLDA total covariance") - 0.5 * LogDet(schur, "PLDA conditional covariance");
}

double PldaScorer::Score(const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size()) {
    throw DimensionError("PLDA score of dimension " + std::to_string(enroll.size()) + "/" +
                         std::to_string(test.size()) + " against model " +
                         std::to_string(mu_.size()));
  }
  const Eigen::VectorXd a = enroll - mu_;
  const Eigen::VectorXd b = test - mu_;
  return 0.5 * (a.dot(q_ * a) + b.dot(q_ * b)) + a.dot(p_ * b) + offset_;
}

}  // namespace ttsspk::backend
