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

#include "ttsspk/numerics/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ttsspk/common/error.h"
#include "ttsspk/numerics/kernels.h"
#include "ttsspk/numerics/tape.h"

namespace ttsspk::num {
namespace {

using detail::Attach;
using detail::MakeResult;
using detail::ShouldRecord;
using ImplPtr = std::shared_ptr<TensorImpl>;

const kernels::KernelTable& K() { return kernels::ActiveKernels(); }

void RequireRank(std::string_view op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got " +
                         ShapeString(t.shape()));
  }
}

// Split a shape around `axis` into (outer, extent, inner) element counts.
struct AxisView {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisView ViewAround(const Shape& shape, std::size_t axis) {
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// Unfolds input [Ci x H x W] into columns [Ci*kh*kw x Ho*Wo].
void Im2Col(const double* in, std::size_t ci, std::size_t h, std::size_t w,
            std::size_t kh, std::size_t kw, std::size_t stride,
            std::size_t pad, std::size_t ho, std::size_t wo, double* cols) {
  const std::size_t p = ho * wo;
  for (std::size_t c = 0; c < ci; ++c) {
    for (std::size_t ky = 0; ky < kh; ++ky) {
      for (std::size_t kx = 0; kx < kw; ++kx) {
        double* row = cols + ((c * kh + ky) * kw + kx) * p;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad);
          double* dst = row + oy * wo;
          if (iy < 0 || iy >= static_cast<long>(h)) {
            std::fill(dst, dst + wo, 0.0);
            continue;
          }
          const double* src = in + (c * h + static_cast<std::size_t>(iy)) * w;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad);
            dst[ox] = (ix < 0 || ix >= static_cast<long>(w))
                          ? 0.0
                          : src[static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

void Col2ImAccumulate(const double* cols, std::size_t ci, std::size_t h,
                      std::size_t w, std::size_t kh, std::size_t kw,
                      std::size_t stride, std::size_t pad, std::size_t ho,
                      std::size_t wo, double* in_grad) {
  const std::size_t p = ho * wo;
  for (std::size_t c = 0; c < ci; ++c) {
    for (std::size_t ky = 0; ky < kh; ++ky) {
      for (std::size_t kx = 0; kx < kw; ++kx) {
        const double* row = cols + ((c * kh + ky) * kw + kx) * p;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad);
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          double* dst = in_grad + (c * h + static_cast<std::size_t>(iy)) * w;
          const double* src = row + oy * wo;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad);
            if (ix < 0 || ix >= static_cast<long>(w)) continue;
            dst[static_cast<std::size_t>(ix)] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireRank("matmul", a, 2);
  RequireRank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " +
                         ShapeString(a.shape()) + " x " +
                         ShapeString(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  K().gemm_nn(m, n, k, a.data().data(), b.data().data(), out.data());
  Tensor y = MakeResult("matmul", {m, n}, std::move(out));
  if (ShouldRecord({&a, &b})) {
    ImplPtr ai = a.shared(), bi = b.shared();
    Attach("matmul", y, {ai, bi}, [ai, bi, m, n, k](const TensorImpl& o) {
      if (ai->requires_grad) {
        ai->EnsureGrad();
        K().gemm_nt(m, k, n, o.grad.data(), bi->data.data(), ai->grad.data());
      }
      if (bi->requires_grad) {
        bi->EnsureGrad();
        K().gemm_tn(k, n, m, ai->data.data(), o.grad.data(), bi->grad.data());
      }
    });
  }
  return y;
}

Tensor Conv2d(const Tensor& input, const Tensor& kernels, std::size_t stride,
              std::size_t padding) {
  RequireRank("conv2d", input, 3);
  RequireRank("conv2d", kernels, 4);
  if (stride < 1) throw DimensionError("conv2d: stride must be >= 1");
  const std::size_t ci = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t co = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
  if (kernels.dim(1) != ci) {
    throw DimensionError("conv2d: kernel channels " + ShapeString(kernels.shape()) +
                         " do not match input " + ShapeString(input.shape()));
  }
  if (kh > h + 2 * padding || kw > w + 2 * padding) {
    throw DimensionError("conv2d: kernel " + ShapeString(kernels.shape()) +
                         " larger than padded input " + ShapeString(input.shape()));
  }
  const std::size_t ho = (h + 2 * padding - kh) / stride + 1;
  const std::size_t wo = (w + 2 * padding - kw) / stride + 1;
  const std::size_t kk = ci * kh * kw, p = ho * wo;
  auto cols = std::make_shared<std::vector<double>>(kk * p);
  Im2Col(input.data().data(), ci, h, w, kh, kw, stride, padding, ho, wo,
         cols->data());
  std::vector<double> out(co * p, 0.0);
  K().gemm_nn(co, p, kk, kernels.data().data(), cols->data(), out.data());
  Tensor y = MakeResult("conv2d", {co, ho, wo}, std::move(out));
  if (ShouldRecord({&input, &kernels})) {
    ImplPtr xi = input.shared(), wi = kernels.shared();
    Attach("conv2d", y, {xi, wi},
           [xi, wi, cols, ci, h, w, co, kh, kw, stride, padding, ho, wo, kk,
            p](const TensorImpl& o) {
             if (wi->requires_grad) {
               wi->EnsureGrad();
               K().gemm_nt(co, kk, p, o.grad.data(), cols->data(), wi->grad.data());
             }
             if (xi->requires_grad) {
               std::vector<double> dcols(kk * p, 0.0);
               K().gemm_tn(kk, p, co, wi->data.data(), o.grad.data(), dcols.data());
               xi->EnsureGrad();
               Col2ImAccumulate(dcols.data(), ci, h, w, kh, kw, stride, padding,
                                ho, wo, xi->grad.data());
             }
           });
  }
  return y;
}

Tensor Conv1d(const Tensor& input, const Tensor& kernels, std::size_t padding) {
  RequireRank("conv1d", input, 2);
  RequireRank("conv1d", kernels, 3);
  const std::size_t t = input.dim(0), ci = input.dim(1);
  const std::size_t co = kernels.dim(0), kw = kernels.dim(2);
  if (kernels.dim(1) != ci) {
    throw DimensionError("conv1d: kernel channels " + ShapeString(kernels.shape()) +
                         " do not match input " + ShapeString(input.shape()));
  }
  if (kw > t + 2 * padding) {
    throw DimensionError("conv1d: kernel " + ShapeString(kernels.shape()) +
                         " longer than padded input " + ShapeString(input.shape()));
  }
  const std::size_t to = t + 2 * padding - kw + 1;
  const std::size_t kk = ci * kw;
  // cols[s, c * kw + k] = input[s + k - padding, c]
  auto cols = std::make_shared<std::vector<double>>(to * kk, 0.0);
  const double* x = input.data().data();
  for (std::size_t s = 0; s < to; ++s) {
    for (std::size_t c = 0; c < ci; ++c) {
      for (std::size_t k = 0; k < kw; ++k) {
        const long src = static_cast<long>(s + k) - static_cast<long>(padding);
        if (src < 0 || src >= static_cast<long>(t)) continue;
        (*cols)[s * kk + c * kw + k] = x[static_cast<std::size_t>(src) * ci + c];
      }
    }
  }
  std::vector<double> out(to * co, 0.0);
  K().gemm_nt(to, co, kk, cols->data(), kernels.data().data(), out.data());
  Tensor y = MakeResult("conv1d", {to, co}, std::move(out));
  if (ShouldRecord({&input, &kernels})) {
    ImplPtr xi = input.shared(), wi = kernels.shared();
    Attach("conv1d", y, {xi, wi},
           [xi, wi, cols, t, ci, co, kw, kk, to, padding](const TensorImpl& o) {
             if (wi->requires_grad) {
               wi->EnsureGrad();
               K().gemm_tn(co, kk, to, o.grad.data(), cols->data(), wi->grad.data());
             }
             if (xi->requires_grad) {
               std::vector<double> dcols(to * kk, 0.0);
               K().gemm_nn(to, kk, co, o.grad.data(), wi->data.data(), dcols.data());
               xi->EnsureGrad();
               for (std::size_t s = 0; s < to; ++s) {
                 for (std::size_t c = 0; c < ci; ++c) {
                   for (std::size_t k = 0; k < kw; ++k) {
                     const long src = static_cast<long>(s + k) - static_cast<long>(padding);
                     if (src < 0 || src >= static_cast<long>(t)) continue;
                     xi->grad[static_cast<std::size_t>(src) * ci + c] +=
                         dcols[s * kk + c * kw + k];
                   }
                 }
               }
             }
           });
  }
  return y;
}

Tensor Unary(UnaryOp op, const Tensor& x) {
  const std::size_t n = x.size();
  const auto xs = x.data();
  std::vector<double> out(n);
  const char* name = "unary";
  switch (op) {
    case UnaryOp::kTanh:
      name = "tanh";
      for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(xs[i]);
      break;
    case UnaryOp::kSigmoid:
      name = "sigmoid";
      for (std::size_t i = 0; i < n; ++i) out[i] = StableSigmoid(xs[i]);
      break;
    case UnaryOp::kRelu:
      name = "relu";
      for (std::size_t i = 0; i < n; ++i) out[i] = xs[i] > 0.0 ? xs[i] : 0.0;
      break;
    case UnaryOp::kLog:
      name = "log";
      for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0)) {
          throw DomainError("log of non-positive value " + std::to_string(xs[i]));
        }
        out[i] = std::log(xs[i]);
      }
      break;
    case UnaryOp::kExp:
      name = "exp";
      for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(xs[i]);
      break;
    case UnaryOp::kSquare:
      name = "square";
      for (std::size_t i = 0; i < n; ++i) out[i] = xs[i] * xs[i];
      break;
    case UnaryOp::kAbs:
      name = "abs";
      for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(xs[i]);
      break;
    case UnaryOp::kSqrt:
      name = "sqrt";
      for (std::size_t i = 0; i < n; ++i) {
        if (xs[i] < 0.0) {
          throw DomainError("sqrt of negative value " + std::to_string(xs[i]));
        }
        out[i] = std::sqrt(xs[i]);
      }
      break;
    case UnaryOp::kNeg:
      name = "neg";
      for (std::size_t i = 0; i < n; ++i) out[i] = -xs[i];
      break;
  }
  Tensor y = MakeResult(name, x.shape(), std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach(name, y, {xi}, [xi, op](const TensorImpl& o) {
      xi->EnsureGrad();
      const std::size_t n = o.data.size();
      const double* g = o.grad.data();
      const double* yv = o.data.data();
      const double* xv = xi->data.data();
      double* dx = xi->grad.data();
      switch (op) {
        case UnaryOp::kTanh:
          for (std::size_t i = 0; i < n; ++i) dx[i] += g[i] * (1.0 - yv[i] * yv[i]);
          break;
        case UnaryOp::kSigmoid:
          for (std::size_t i = 0; i < n; ++i) dx[i] += g[i] * yv[i] * (1.0 - yv[i]);
          break;
        case UnaryOp::kRelu:
          for (std::size_t i = 0; i < n; ++i) dx[i] += xv[i] > 0.0 ? g[i] : 0.0;
          break;
        case UnaryOp::kLog:
          for (std::size_t i = 0; i < n; ++i) dx[i] += g[i] / xv[i];
          break;
        case UnaryOp::kExp:
          for (std::size_t i = 0; i < n; ++i) dx[i] += g[i] * yv[i];
          break;
        case UnaryOp::kSquare:
          for (std::size_t i = 0; i < n; ++i) dx[i] += 2.0 * xv[i] * g[i];
          break;
        case UnaryOp::kAbs:
          for (std::size_t i = 0; i < n; ++i) {
            dx[i] += xv[i] > 0.0 ? g[i] : (xv[i] < 0.0 ? -g[i] : 0.0);
          }
          break;
        case UnaryOp::kSqrt:
          for (std::size_t i = 0; i < n; ++i) {
            if (yv[i] > 0.0) dx[i] += g[i] / (2.0 * yv[i]);
          }
          break;
        case UnaryOp::kNeg:
          for (std::size_t i = 0; i < n; ++i) dx[i] -= g[i];
          break;
      }
    });
  }
  return y;
}

Tensor Binary(BinaryOp op, const Tensor& a, const Tensor& b) {
  const bool same = a.shape() == b.shape();
  const bool a_scalar = a.size() == 1 && !same;
  const bool b_scalar = b.size() == 1 && !same;
  if (!same && !a_scalar && !b_scalar) {
    throw DimensionError("elementwise op on mismatched shapes " +
                         ShapeString(a.shape()) + " and " +
                         ShapeString(b.shape()));
  }
  const Shape shape =
      a_scalar && !(b_scalar && a.rank() >= b.rank()) ? b.shape() : a.shape();
  const std::size_t n = NumElements(shape);
  const auto av = a.data();
  const auto bv = b.data();
  auto ai_ = [&](std::size_t i) { return a_scalar ? av[0] : av[i]; };
  auto bi_ = [&](std::size_t i) { return b_scalar ? bv[0] : bv[i]; };
  std::vector<double> out(n);
  const char* name = "binary";
  switch (op) {
    case BinaryOp::kAdd:
      name = "add";
      for (std::size_t i = 0; i < n; ++i) out[i] = ai_(i) + bi_(i);
      break;
    case BinaryOp::kSub:
      name = "sub";
      for (std::size_t i = 0; i < n; ++i) out[i] = ai_(i) - bi_(i);
      break;
    case BinaryOp::kMul:
      name = "mul";
      for (std::size_t i = 0; i < n; ++i) out[i] = ai_(i) * bi_(i);
      break;
    case BinaryOp::kDiv:
      name = "div";
      for (std::size_t i = 0; i < n; ++i) {
        if (bi_(i) == 0.0) throw DomainError("division by zero");
        out[i] = ai_(i) / bi_(i);
      }
      break;
  }
  Tensor y = MakeResult(name, shape, std::move(out));
  if (ShouldRecord({&a, &b})) {
    ImplPtr ap = a.shared(), bp = b.shared();
    Attach(name, y, {ap, bp}, [ap, bp, op, a_scalar, b_scalar](const TensorImpl& o) {
      const std::size_t n = o.data.size();
      const double* g = o.grad.data();
      const double* av = ap->data.data();
      const double* bv = bp->data.data();
      auto aval = [&](std::size_t i) { return a_scalar ? av[0] : av[i]; };
      auto bval = [&](std::size_t i) { return b_scalar ? bv[0] : bv[i]; };
      if (ap->requires_grad) {
        ap->EnsureGrad();
        double* da = ap->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
          double d = 0.0;
          switch (op) {
            case BinaryOp::kAdd:
            case BinaryOp::kSub:
              d = g[i];
              break;
            case BinaryOp::kMul:
              d = g[i] * bval(i);
              break;
            case BinaryOp::kDiv:
              d = g[i] / bval(i);
              break;
          }
          da[a_scalar ? 0 : i] += d;
        }
      }
      if (bp->requires_grad) {
        bp->EnsureGrad();
        double* db = bp->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
          double d = 0.0;
          switch (op) {
            case BinaryOp::kAdd:
              d = g[i];
              break;
            case BinaryOp::kSub:
              d = -g[i];
              break;
            case BinaryOp::kMul:
              d = g[i] * aval(i);
              break;
            case BinaryOp::kDiv: {
              const double bv_i = bval(i);
              d = -g[i] * aval(i) / (bv_i * bv_i);
              break;
            }
          }
          db[b_scalar ? 0 : i] += d;
        }
      }
    });
  }
  return y;
}

Tensor Elementwise(std::string_view op_name, std::span<const Tensor> operands) {
  struct UnaryName {
    std::string_view name;
    UnaryOp op;
  };
  struct BinaryName {
    std::string_view name;
    BinaryOp op;
  };
  static constexpr UnaryName kUnary[] = {
      {"tanh", UnaryOp::kTanh}, {"sigmoid", UnaryOp::kSigmoid},
      {"relu", UnaryOp::kRelu}, {"log", UnaryOp::kLog},
      {"exp", UnaryOp::kExp},   {"square", UnaryOp::kSquare},
      {"abs", UnaryOp::kAbs},   {"sqrt", UnaryOp::kSqrt},
      {"neg", UnaryOp::kNeg}};
  static constexpr BinaryName kBinary[] = {{"add", BinaryOp::kAdd},
                                           {"sub", BinaryOp::kSub},
                                           {"mul", BinaryOp::kMul},
                                           {"div", BinaryOp::kDiv}};
  for (const auto& u : kUnary) {
    if (u.name != op_name) continue;
    if (operands.size() != 1) {
      throw UsageError(std::string(op_name) + " takes exactly one operand");
    }
    return Unary(u.op, operands[0]);
  }
  for (const auto& b : kBinary) {
    if (b.name != op_name) continue;
    if (operands.size() != 2) {
      throw UsageError(std::string(op_name) + " takes exactly two operands");
    }
    return Binary(b.op, operands[0], operands[1]);
  }
  throw UsageError("unknown elementwise op '" + std::string(op_name) + "'");
}

Tensor Scale(const Tensor& x, double factor) {
  std::vector<double> out(x.data().begin(), x.data().end());
  for (double& v : out) v *= factor;
  Tensor y = MakeResult("scale", x.shape(), std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("scale", y, {xi}, [xi, factor](const TensorImpl& o) {
      xi->EnsureGrad();
      K().axpy(factor, o.grad.data(), xi->grad.data(), o.grad.size());
    });
  }
  return y;
}

Tensor Softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) +
                         " out of range for " + ShapeString(x.shape()));
  }
  const AxisView v = ViewAround(x.shape(), axis);
  const auto xs = x.data();
  std::vector<double> out(xs.size());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.extent * v.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < v.extent; ++k) mx = std::max(mx, xs[base + k * v.inner]);
      double s = 0.0;
      for (std::size_t k = 0; k < v.extent; ++k) {
        const double e = std::exp(xs[base + k * v.inner] - mx);
        out[base + k * v.inner] = e;
        s += e;
      }
      for (std::size_t k = 0; k < v.extent; ++k) out[base + k * v.inner] /= s;
    }
  }
  Tensor y = MakeResult("softmax", x.shape(), std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("softmax", y, {xi}, [xi, v](const TensorImpl& o) {
      xi->EnsureGrad();
      for (std::size_t ou = 0; ou < v.outer; ++ou) {
        for (std::size_t in = 0; in < v.inner; ++in) {
          const std::size_t base = ou * v.extent * v.inner + in;
          double dot = 0.0;
          for (std::size_t k = 0; k < v.extent; ++k) {
            const std::size_t i = base + k * v.inner;
            dot += o.grad[i] * o.data[i];
          }
          for (std::size_t k = 0; k < v.extent; ++k) {
            const std::size_t i = base + k * v.inner;
            xi->grad[i] += o.data[i] * (o.grad[i] - dot);
          }
        }
      }
    });
  }
  return y;
}

Tensor Concat(std::span<const Tensor> tensors, std::size_t axis) {
  if (tensors.empty()) throw DimensionError("concat: no inputs");
  const Shape& first = tensors[0].shape();
  if (axis >= first.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) +
                         " out of range for " + ShapeString(first));
  }
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor& t : tensors) {
    if (t.rank() != first.size()) {
      throw DimensionError("concat: rank mismatch " + ShapeString(first) +
                           " vs " + ShapeString(t.shape()));
    }
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (i != axis && t.dim(i) != first[i]) {
        throw DimensionError("concat: extents differ off axis, " +
                             ShapeString(first) + " vs " +
                             ShapeString(t.shape()));
      }
    }
    shape[axis] += t.dim(axis);
  }
  const AxisView out_view = ViewAround(shape, axis);
  const std::size_t out_row = out_view.extent * out_view.inner;
  std::vector<double> out(NumElements(shape));
  std::vector<std::size_t> offsets;
  offsets.reserve(tensors.size());
  std::size_t offset = 0;
  for (const Tensor& t : tensors) {
    offsets.push_back(offset);
    const std::size_t chunk = t.dim(axis) * out_view.inner;
    const auto src = t.data();
    for (std::size_t o = 0; o < out_view.outer; ++o) {
      std::copy_n(src.begin() + o * chunk, chunk,
                  out.begin() + o * out_row + offset);
    }
    offset += chunk;
  }
  Tensor y = MakeResult("concat", shape, std::move(out));
  std::vector<Tensor> inputs(tensors.begin(), tensors.end());
  if (ShouldRecord(inputs)) {
    std::vector<ImplPtr> impls;
    impls.reserve(inputs.size());
    for (const Tensor& t : inputs) impls.push_back(t.shared());
    Attach("concat", y, impls,
           [impls, offsets, axis, out_view, out_row](const TensorImpl& o) {
             for (std::size_t k = 0; k < impls.size(); ++k) {
               TensorImpl& in = *impls[k];
               if (!in.requires_grad) continue;
               in.EnsureGrad();
               const std::size_t chunk = in.shape[axis] * out_view.inner;
               for (std::size_t ou = 0; ou < out_view.outer; ++ou) {
                 const double* g = o.grad.data() + ou * out_row + offsets[k];
                 double* d = in.grad.data() + ou * chunk;
                 for (std::size_t i = 0; i < chunk; ++i) d[i] += g[i];
               }
             }
           });
  }
  return y;
}

Tensor Slice(const Tensor& x, std::size_t axis, std::size_t begin,
             std::size_t end) {
  if (axis >= x.rank() || begin >= end || end > x.dim(axis)) {
    throw DimensionError("slice [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") on axis " +
                         std::to_string(axis) + " of " + ShapeString(x.shape()));
  }
  const AxisView v = ViewAround(x.shape(), axis);
  Shape shape = x.shape();
  shape[axis] = end - begin;
  const std::size_t in_row = v.extent * v.inner;
  const std::size_t chunk = (end - begin) * v.inner;
  const std::size_t skip = begin * v.inner;
  std::vector<double> out(v.outer * chunk);
  const auto xs = x.data();
  for (std::size_t o = 0; o < v.outer; ++o) {
    std::copy_n(xs.begin() + o * in_row + skip, chunk, out.begin() + o * chunk);
  }
  Tensor y = MakeResult("slice", shape, std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("slice", y, {xi}, [xi, v, in_row, chunk, skip](const TensorImpl& o) {
      xi->EnsureGrad();
      for (std::size_t ou = 0; ou < v.outer; ++ou) {
        const double* g = o.grad.data() + ou * chunk;
        double* d = xi->grad.data() + ou * in_row + skip;
        for (std::size_t i = 0; i < chunk; ++i) d[i] += g[i];
      }
    });
  }
  return y;
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (NumElements(shape) != x.size()) {
    throw DimensionError("reshape " + ShapeString(x.shape()) + " to " +
                         ShapeString(shape));
  }
  Tensor y(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("reshape", y, {xi}, [xi](const TensorImpl& o) {
      xi->EnsureGrad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) xi->grad[i] += o.grad[i];
    });
  }
  return y;
}

Tensor Transpose(const Tensor& x) {
  RequireRank("transpose", x, 2);
  const std::size_t m = x.dim(0), n = x.dim(1);
  std::vector<double> out(m * n);
  const auto xs = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = xs[i * n + j];
  }
  Tensor y(Shape{n, m}, std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("transpose", y, {xi}, [xi, m, n](const TensorImpl& o) {
      xi->EnsureGrad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) xi->grad[i * n + j] += o.grad[j * m + i];
      }
    });
  }
  return y;
}

Tensor SwapLeadingAxes(const Tensor& x) {
  RequireRank("swap_leading_axes", x, 3);
  const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
  std::vector<double> out(a * b * c);
  const auto xs = x.data();
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      std::copy_n(xs.begin() + (i * b + j) * c, c, out.begin() + (j * a + i) * c);
    }
  }
  Tensor y(Shape{b, a, c}, std::move(out));
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("swap_leading_axes", y, {xi}, [xi, a, b, c](const TensorImpl& o) {
      xi->EnsureGrad();
      for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
          const double* g = o.grad.data() + (j * a + i) * c;
          double* d = xi->grad.data() + (i * b + j) * c;
          for (std::size_t k = 0; k < c; ++k) d[k] += g[k];
        }
      }
    });
  }
  return y;
}

Tensor Sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  Tensor y = MakeResult("sum", {1}, {s});
  if (ShouldRecord({&x})) {
    ImplPtr xi = x.shared();
    Attach("sum", y, {xi}, [xi](const TensorImpl& o) {
      xi->EnsureGrad();
      const double g = o.grad[0];
      for (double& d : xi->grad) d += g;
    });
  }
  return y;
}

Tensor Mean(const Tensor& x) { return Scale(Sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor AddRowBroadcast(const Tensor& x, const Tensor& row) {
  RequireRank("add_row_broadcast", x, 2);
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (row.size() != n) {
    throw DimensionError("add_row_broadcast: row " + ShapeString(row.shape()) +
                         " does not fit " + ShapeString(x.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  const auto r = row.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += r[j];
  }
  Tensor y = MakeResult("add_row_broadcast", x.shape(), std::move(out));
  if (ShouldRecord({&x, &row})) {
    ImplPtr xi = x.shared(), ri = row.shared();
    Attach("add_row_broadcast", y, {xi, ri}, [xi, ri, m, n](const TensorImpl& o) {
      if (xi->requires_grad) {
        xi->EnsureGrad();
        for (std::size_t i = 0; i < m * n; ++i) xi->grad[i] += o.grad[i];
      }
      if (ri->requires_grad) {
        ri->EnsureGrad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) ri->grad[j] += o.grad[i * n + j];
        }
      }
    });
  }
  return y;
}

Tensor AddChannelBias(const Tensor& x, const Tensor& bias) {
  RequireRank("add_channel_bias", x, 3);
  const std::size_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  if (bias.size() != c) {
    throw DimensionError("add_channel_bias: bias " + ShapeString(bias.shape()) +
                         " does not fit " + ShapeString(x.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  const auto b = bias.data();
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t i = 0; i < hw; ++i) out[k * hw + i] += b[k];
  }
  Tensor y = MakeResult("add_channel_bias", x.shape(), std::move(out));
  if (ShouldRecord({&x, &bias})) {
    ImplPtr xi = x.shared(), bi = bias.shared();
    Attach("add_channel_bias", y, {xi, bi}, [xi, bi, c, hw](const TensorImpl& o) {
      if (xi->requires_grad) {
        xi->EnsureGrad();
        for (std::size_t i = 0; i < c * hw; ++i) xi->grad[i] += o.grad[i];
      }
      if (bi->requires_grad) {
        bi->EnsureGrad();
        for (std::size_t k = 0; k < c; ++k) {
          double acc = 0.0;
          for (std::size_t i = 0; i < hw; ++i) acc += o.grad[k * hw + i];
          bi->grad[k] += acc;
        }
      }
    });
  }
  return y;
}

Tensor RepeatRows(const Tensor& row, std::size_t count) {
  if (count == 0) throw DimensionError("repeat_rows: count must be positive");
  const std::size_t n = row.size();
  std::vector<double> out(count * n);
  const auto r = row.data();
  for (std::size_t i = 0; i < count; ++i) std::copy(r.begin(), r.end(), out.begin() + i * n);
  Tensor y(Shape{count, n}, std::move(out));
  if (ShouldRecord({&row})) {
    ImplPtr ri = row.shared();
    Attach("repeat_rows", y, {ri}, [ri, count, n](const TensorImpl& o) {
      ri->EnsureGrad();
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < n; ++j) ri->grad[j] += o.grad[i * n + j];
      }
    });
  }
  return y;
}

Tensor Gather(const Tensor& table, std::span<const std::size_t> ids) {
  RequireRank("gather", table, 2);
  if (ids.empty()) throw DimensionError("gather: empty id list");
  const std::size_t v = table.dim(0), d = table.dim(1);
  std::vector<double> out(ids.size() * d);
  const auto t = table.data();
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] >= v) {
      throw DimensionError("gather: id " + std::to_string(ids[j]) +
                           " out of range for table of " + std::to_string(v) +
                           " rows");
    }
    std::copy_n(t.begin() + ids[j] * d, d, out.begin() + j * d);
  }
  Tensor y(Shape{ids.size(), d}, std::move(out));
  if (ShouldRecord({&table})) {
    ImplPtr ti = table.shared();
    std::vector<std::size_t> idv(ids.begin(), ids.end());
    Attach("gather", y, {ti}, [ti, idv, d](const TensorImpl& o) {
      ti->EnsureGrad();
      for (std::size_t j = 0; j < idv.size(); ++j) {
        for (std::size_t k = 0; k < d; ++k) ti->grad[idv[j] * d + k] += o.grad[j * d + k];
      }
    });
  }
  return y;
}

Tensor LstmPointwise(const Tensor& gates, const Tensor& c) {
  const std::size_t hdim = c.size();
  if (gates.size() != 4 * hdim) {
    throw DimensionError("lstm: gates " + ShapeString(gates.shape()) +
                         " do not match cell " + ShapeString(c.shape()));
  }
  const auto z = gates.data();
  const auto cv = c.data();
  // Saved activations: i, f, g, o, tanh(c').
  auto act = std::make_shared<std::vector<double>>(5 * hdim);
  std::vector<double> out(2 * hdim);
  for (std::size_t k = 0; k < hdim; ++k) {
    const double i = StableSigmoid(z[k]);
    const double f = StableSigmoid(z[hdim + k]);
    const double g = std::tanh(z[2 * hdim + k]);
    const double o = StableSigmoid(z[3 * hdim + k]);
    const double cn = f * cv[k] + i * g;
    const double tc = std::tanh(cn);
    (*act)[k] = i;
    (*act)[hdim + k] = f;
    (*act)[2 * hdim + k] = g;
    (*act)[3 * hdim + k] = o;
    (*act)[4 * hdim + k] = tc;
    out[k] = o * tc;
    out[hdim + k] = cn;
  }
  Tensor y = MakeResult("lstm_pointwise", {1, 2 * hdim}, std::move(out));
  if (ShouldRecord({&gates, &c})) {
    ImplPtr zi = gates.shared(), ci = c.shared();
    Attach("lstm_pointwise", y, {zi, ci}, [zi, ci, act, hdim](const TensorImpl& out) {
      const double* a = act->data();
      if (zi->requires_grad) zi->EnsureGrad();
      if (ci->requires_grad) ci->EnsureGrad();
      for (std::size_t k = 0; k < hdim; ++k) {
        const double i = a[k], f = a[hdim + k], g = a[2 * hdim + k];
        const double o = a[3 * hdim + k], tc = a[4 * hdim + k];
        const double dh = out.grad[k];
        const double dc = out.grad[hdim + k] + dh * o * (1.0 - tc * tc);
        if (zi->requires_grad) {
          double* dz = zi->grad.data();
          dz[k] += dc * g * i * (1.0 - i);
          dz[hdim + k] += dc * ci->data[k] * f * (1.0 - f);
          dz[2 * hdim + k] += dc * i * (1.0 - g * g);
          dz[3 * hdim + k] += dh * tc * o * (1.0 - o);
        }
        if (ci->requires_grad) ci->grad[k] += dc * f;
      }
    });
  }
  return y;
}

LstmState RecurrentStep(const Tensor& x, const LstmState& state,
                        const LstmParams& params) {
  const std::size_t hdim = state.h.size();
  if (state.c.size() != hdim || params.weight.rank() != 2 ||
      params.weight.dim(1) != 4 * hdim ||
      params.weight.dim(0) != x.size() + hdim || params.bias.size() != 4 * hdim) {
    throw DimensionError("recurrent_step: input " + ShapeString(x.shape()) +
                         ", state " + ShapeString(state.h.shape()) +
                         " and weight " + ShapeString(params.weight.shape()) +
                         " are inconsistent");
  }
  const Tensor xr = x.rank() == 2 ? x : Reshape(x, {1, x.size()});
  const Tensor hr = state.h.rank() == 2 ? state.h : Reshape(state.h, {1, hdim});
  const Tensor cr = state.c.rank() == 2 ? state.c : Reshape(state.c, {1, hdim});
  const Tensor z =
      AddRowBroadcast(MatMul(Concat({xr, hr}, 1), params.weight), params.bias);
  const Tensor hc = LstmPointwise(z, cr);
  return {Slice(hc, 1, 0, hdim), Slice(hc, 1, hdim, 2 * hdim)};
}

Tensor SoftmaxCrossEntropy(const Tensor& logits, std::size_t label) {
  const std::size_t s = logits.size();
  if (label >= s) {
    throw DimensionError("cross entropy: label " + std::to_string(label) +
                         " out of range for " + std::to_string(s) + " classes");
  }
  const auto z = logits.data();
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  Tensor y = MakeResult("softmax_cross_entropy", {1}, {lse - z[label]});
  if (ShouldRecord({&logits})) {
    ImplPtr li = logits.shared();
    Attach("softmax_cross_entropy", y, {li}, [li, label, lse](const TensorImpl& o) {
      li->EnsureGrad();
      const double g = o.grad[0];
      for (std::size_t j = 0; j < li->data.size(); ++j) {
        const double p = std::exp(li->data[j] - lse);
        li->grad[j] += g * (p - (j == label ? 1.0 : 0.0));
      }
    });
  }
  return y;
}

Tensor BceWithLogits(const Tensor& logits, std::span<const double> targets,
                     double positive_weight) {
  const std::size_t n = logits.size();
  if (targets.size() != n) {
    throw DimensionError("bce: " + std::to_string(targets.size()) +
                         " targets for logits " + ShapeString(logits.shape()));
  }
  const auto z = logits.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += positive_weight * targets[i] * Softplus(-z[i]) +
             (1.0 - targets[i]) * Softplus(z[i]);
  }
  Tensor y = MakeResult("bce_with_logits", {1}, {total / static_cast<double>(n)});
  if (ShouldRecord({&logits})) {
    ImplPtr li = logits.shared();
    std::vector<double> tv(targets.begin(), targets.end());
    Attach("bce_with_logits", y, {li}, [li, tv, positive_weight](const TensorImpl& o) {
      li->EnsureGrad();
      const double scale = o.grad[0] / static_cast<double>(tv.size());
      for (std::size_t i = 0; i < tv.size(); ++i) {
        const double s = StableSigmoid(li->data[i]);
        li->grad[i] += scale * (positive_weight * tv[i] * (s - 1.0) + (1.0 - tv[i]) * s);
      }
    });
  }
  return y;
}

}  // namespace ttsspk::num
