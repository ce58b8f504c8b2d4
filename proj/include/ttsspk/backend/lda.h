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

#ifndef TTSSPK_BACKEND_LDA_H_
#define TTSSPK_BACKEND_LDA_H_

#include <vector>

#include <Eigen/Dense>

namespace ttsspk::backend {

// y = projection^T (x - mean).
struct LdaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd projection;  // D_e x d_out

  Eigen::VectorXd Project(const Eigen::VectorXd& x) const;
};

// Within- and between-class scatter, both normalized by the sample count.
struct Scatter {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
  Eigen::VectorXd mean;
};
Scatter ComputeScatter(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels);

// Adds 1e-6 * trace(s) / dim to the diagonal.
Eigen::MatrixXd Ridge(const Eigen::MatrixXd& s);

// Top generalized eigenvectors of S_b v = lambda S_w v, scaled to unit
// S_w-norm so the projected within-class covariance is the identity.
// Needs >= 2 classes with >= 2 samples each and d_out <= n_classes - 1.
LdaModel FitLda(const std::vector<Eigen::VectorXd>& x, const std::vector<int>& labels,
                int d_out);

}  // namespace ttsspk::backend

#endif  // TTSSPK_BACKEND_LDA_H_
