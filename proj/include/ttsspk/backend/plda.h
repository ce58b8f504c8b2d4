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

#ifndef TTSSPK_BACKEND_PLDA_H_
#define TTSSPK_BACKEND_PLDA_H_

#include <vector>

#include <Eigen/Dense>

namespace ttsspk::backend {

// Two-covariance model: y ~ N(mu, sigma_b), x | y ~ N(y, sigma_w).
struct PldaModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma_b;
  Eigen::MatrixXd sigma_w;
};

struct PldaFitResult {
  PldaModel model;
  // Data log-likelihood before the first and after every EM iteration.
  std::vector<double> log_likelihood;
};

// Marginal log-likelihood of labelled data under `model`.
double PldaLogLikelihood(const PldaModel& model, const std::vector<Eigen::VectorXd>& x,
                         const std::vector<int>& labels);

// EM from a moment-matched start. When `ridge` is set, sigma_w gets
// 1e-6 * trace / dim on its diagonal after every M-step. Throws
// NumericError naming the iteration if a covariance collapses.
PldaFitResult FitPlda(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels,
                      int em_iters = 20, bool ridge = true);

// Closed-form same/different-speaker log-likelihood ratio. Construction
// precomputes the quadratic form; scoring is then O(d^2).
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& model);
  double Score(const Eigen::VectorXd& enroll, const Eigen::VectorXd& test) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd q_;  // applies to each side
  Eigen::MatrixXd p_;  // cross term
  double offset_ = 0.0;
};

}  // namespace ttsspk::backend

#endif  // TTSSPK_BACKEND_PLDA_H_
