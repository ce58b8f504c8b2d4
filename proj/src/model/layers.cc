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

#include "ttsspk/model/layers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::model {

using num::Tensor;
using num::TensorImpl;
using ImplPtr = std::shared_ptr<TensorImpl>;

Tensor& ParameterStore::Add(const std::string& name, Tensor value, bool trainable) {
  if (index_.count(name)) throw UsageError("duplicate parameter " + name);
  value.set_requires_grad(trainable);
  index_[name] = entries_.size();
  entries_.push_back({name, std::move(value), trainable});
  return entries_.back().value;
}

const Tensor& ParameterStore::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("no parameter named " + name);
  return entries_[it->second].value;
}

Tensor& ParameterStore::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InputError("no parameter named " + name);
  return entries_[it->second].value;
}

bool ParameterStore::IsTrainable(const std::string& name) const {
  auto it = index_.find(name);
  return it != index_.end() && entries_[it->second].trainable;
}

std::vector<num::NamedParameter> ParameterStore::Trainable() const {
  std::vector<num::NamedParameter> out;
  for (const auto& e : entries_) {
    if (e.trainable) out.push_back({e.name, e.value});
  }
  return out;
}

std::vector<num::NamedParameter> ParameterStore::All() const {
  std::vector<num::NamedParameter> out;
  for (const auto& e : entries_) out.push_back({e.name, e.value});
  return out;
}

Tensor GlorotUniform(num::Shape shape, std::size_t fan_in, std::size_t fan_out,
                     std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-a, a);
  std::vector<double> v(num::NumElements(shape));
  for (double& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v));
}

Tensor GaussianInit(num::Shape shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(num::NumElements(shape));
  for (double& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v));
}

Tensor LdePool(const Tensor& frames, const Tensor& centers, const Tensor& log_scales) {
  constexpr double kEps = 1e-8;
  if (frames.rank() != 2 || centers.rank() != 2 || frames.dim(1) != centers.dim(1) ||
      log_scales.size() != centers.dim(0)) {
    throw DimensionError("lde_pool: frames " + num::ShapeString(frames.shape()) +
                         ", centers " + num::ShapeString(centers.shape()) +
                         " and scales " + num::ShapeString(log_scales.shape()) +
                         " are inconsistent");
  }
  const std::size_t t_len = frames.dim(0), dim = frames.dim(1), comps = centers.dim(0);
  const auto x = frames.data();
  const auto mu = centers.data();
  const auto sig = log_scales.data();

  std::vector<double> scale(comps), logits(t_len * comps), w(t_len * comps);
  for (std::size_t c = 0; c < comps; ++c) scale[c] = std::exp(sig[c]);
  for (std::size_t t = 0; t < t_len; ++t) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < comps; ++c) {
      double d = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double r = x[t * dim + k] - mu[c * dim + k];
        d += r * r;
      }
      logits[t * comps + c] = -scale[c] * d;
      mx = std::max(mx, logits[t * comps + c]);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < comps; ++c) {
      w[t * comps + c] = std::exp(logits[t * comps + c] - mx);
      s += w[t * comps + c];
    }
    for (std::size_t c = 0; c < comps; ++c) w[t * comps + c] /= s;
  }
  std::vector<double> mass(comps, 0.0), out(comps * dim, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t c = 0; c < comps; ++c) {
      const double wt = w[t * comps + c];
      mass[c] += wt;
      for (std::size_t k = 0; k < dim; ++k) {
        out[c * dim + k] += wt * (x[t * dim + k] - mu[c * dim + k]);
      }
    }
  }
  for (std::size_t c = 0; c < comps; ++c) {
    for (std::size_t k = 0; k < dim; ++k) out[c * dim + k] /= mass[c] + kEps;
  }
  Tensor y = num::detail::MakeResult("lde_pool", {1, comps * dim}, std::move(out));
  if (!num::detail::ShouldRecord({&frames, &centers, &log_scales})) return y;

  ImplPtr xi = frames.shared(), mi = centers.shared(), si = log_scales.shared();
  num::detail::Attach(
      "lde_pool", y, {xi, mi, si},
      [xi, mi, si, t_len, dim, comps, w = std::move(w), logits = std::move(logits),
       mass = std::move(mass), scale = std::move(scale)](const TensorImpl& o) {
        const std::vector<double>& xd = xi->data;
        const std::vector<double>& md = mi->data;
        const std::vector<double>& e = o.data;
        const std::vector<double>& g = o.grad;
        std::vector<double> gx(t_len * dim, 0.0), gmu(comps * dim, 0.0), gsig(comps, 0.0);
        std::vector<double> gw(comps), ga(comps);
        for (std::size_t t = 0; t < t_len; ++t) {
          // d e_c / d w_tc = ((x_t - mu_c) - e_c) / (W_c + eps)
          for (std::size_t c = 0; c < comps; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              const double r = xd[t * dim + k] - md[c * dim + k];
              acc += g[c * dim + k] * (r - e[c * dim + k]);
            }
            gw[c] = acc / (mass[c] + kEps);
          }
          double dot = 0.0;
          for (std::size_t c = 0; c < comps; ++c) dot += w[t * comps + c] * gw[c];
          for (std::size_t c = 0; c < comps; ++c) {
            const double wt = w[t * comps + c];
            ga[c] = wt * (gw[c] - dot);
            gsig[c] += ga[c] * logits[t * comps + c];
            // logits = -s_c |x_t - mu_c|^2
            const double gd = -scale[c] * ga[c];
            const double direct = wt / (mass[c] + kEps);
            for (std::size_t k = 0; k < dim; ++k) {
              const double r = xd[t * dim + k] - md[c * dim + k];
              const double gr = 2.0 * gd * r;
              gx[t * dim + k] += gr + direct * g[c * dim + k];
              gmu[c * dim + k] -= gr;
            }
          }
        }
        for (std::size_t c = 0; c < comps; ++c) {
          const double f = mass[c] / (mass[c] + kEps);
          for (std::size_t k = 0; k < dim; ++k) gmu[c * dim + k] -= f * g[c * dim + k];
        }
        if (xi->requires_grad) {
          xi->EnsureGrad();
          for (std::size_t i = 0; i < gx.size(); ++i) xi->grad[i] += gx[i];
        }
        if (mi->requires_grad) {
          mi->EnsureGrad();
          for (std::size_t i = 0; i < gmu.size(); ++i) mi->grad[i] += gmu[i];
        }
        if (si->requires_grad) {
          si->EnsureGrad();
          for (std::size_t i = 0; i < gsig.size(); ++i) si->grad[i] += gsig[i];
        }
      });
  return y;
}

namespace {

int MarginSegment(double cosine, int margin) {
  const double theta = std::acos(std::clamp(cosine, -1.0, 1.0));
  const int k = static_cast<int>(std::floor(margin * theta / std::numbers::pi));
  return std::min(k, margin - 1);
}

// Chebyshev polynomials T_m(c) = cos(m acos c) and U_{m-1}(c).
void Chebyshev(double c, int m, double& t_m, double& u_m1) {
  double t_prev = 1.0, t_cur = c;  // T_0, T_1
  double u_prev = 0.0, u_cur = 1.0;  // U_{-1}, U_0
  for (int i = 1; i < m; ++i) {
    const double t_next = 2.0 * c * t_cur - t_prev;
    const double u_next = 2.0 * c * u_cur - u_prev;
    t_prev = t_cur;
    t_cur = t_next;
    u_prev = u_cur;
    u_cur = u_next;
  }
  t_m = m == 0 ? 1.0 : t_cur;
  u_m1 = u_cur;
}

}  // namespace

double AngularPsi(double cosine, int margin) {
  if (margin < 1) throw ConfigError("angular margin must be >= 1");
  const int k = MarginSegment(cosine, margin);
  double t_m = 0.0, u = 0.0;
  Chebyshev(std::clamp(cosine, -1.0, 1.0), margin, t_m, u);
  return (k % 2 == 0 ? 1.0 : -1.0) * t_m - 2.0 * k;
}

Tensor AngularPsi(const Tensor& cosine, int margin) {
  if (margin < 1) throw ConfigError("angular margin must be >= 1");
  const auto c = cosine.data();
  std::vector<double> out(c.size()), slope(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double ci = std::clamp(c[i], -1.0, 1.0);
    const int k = MarginSegment(ci, margin);
    double t_m = 0.0, u = 0.0;
    Chebyshev(ci, margin, t_m, u);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    out[i] = sign * t_m - 2.0 * k;
    // d T_m / dc = m U_{m-1}
    slope[i] = sign * margin * u;
  }
  Tensor y = num::detail::MakeResult("angular_psi", cosine.shape(), std::move(out));
  if (num::detail::ShouldRecord({&cosine})) {
    ImplPtr ci = cosine.shared();
    num::detail::Attach("angular_psi", y, {ci},
                        [ci, slope = std::move(slope)](const TensorImpl& o) {
                          ci->EnsureGrad();
                          for (std::size_t i = 0; i < slope.size(); ++i) {
                            ci->grad[i] += slope[i] * o.grad[i];
                          }
                        });
  }
  return y;
}

}  // namespace ttsspk::model
