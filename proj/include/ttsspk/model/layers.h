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

#ifndef TTSSPK_MODEL_LAYERS_H_
#define TTSSPK_MODEL_LAYERS_H_

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ttsspk/numerics/adam.h"
#include "ttsspk/numerics/tensor.h"

namespace ttsspk::model {

// Named tensors in creation order. Trainable entries take part in the
// optimizer; the others (feature statistics) are only checkpointed.
class ParameterStore {
 public:
  num::Tensor& Add(const std::string& name, num::Tensor value, bool trainable = true);
  // Throws InputError for unknown names.
  const num::Tensor& Get(const std::string& name) const;
  num::Tensor& Get(const std::string& name);
  bool Contains(const std::string& name) const { return index_.count(name) > 0; }

  std::vector<num::NamedParameter> Trainable() const;
  std::vector<num::NamedParameter> All() const;
  bool IsTrainable(const std::string& name) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string name;
    num::Tensor value;
    bool trainable;
  };
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

// uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
num::Tensor GlorotUniform(num::Shape shape, std::size_t fan_in, std::size_t fan_out,
                          std::mt19937_64& rng);
num::Tensor GaussianInit(num::Shape shape, double stddev, std::mt19937_64& rng);

// Learnable-dictionary pooling of frames x [T x D_f] against centers
// [C x D_f] with log-scales sigma [1 x C] (s_c = exp(sigma_c)):
//   w_tc = softmax_c(-s_c |x_t - mu_c|^2)
//   e_c  = sum_t w_tc (x_t - mu_c) / (sum_t w_tc + 1e-8)
// Returns [1 x C*D_f], components concatenated.
num::Tensor LdePool(const num::Tensor& frames, const num::Tensor& centers,
                    const num::Tensor& log_scales);

// Multiplicative angular margin applied to a cosine c = cos(theta):
// psi = (-1)^k cos(m theta) - 2k with k = floor(m theta / pi).
double AngularPsi(double cosine, int margin);
num::Tensor AngularPsi(const num::Tensor& cosine, int margin);

}  // namespace ttsspk::model

#endif  // TTSSPK_MODEL_LAYERS_H_
