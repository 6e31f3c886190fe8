// Copyright 2026 The artimit Authors.
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

#include "artimit/graph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "artimit/common/error.hpp"

namespace artimit {
namespace {

constexpr double kGeluCoeff = 0.044715;

void RequireSame(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.SameShape(b)) {
    Fail(ErrorKind::kDimension, std::string(op) + ": shape mismatch " +
                                    a.ShapeString() + " vs " +
                                    b.ShapeString());
  }
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double GeluInner(double x) {
  return std::sqrt(2.0 / std::numbers::pi) * (x + kGeluCoeff * x * x * x);
}

double ActivationDerivative(Activation a, double x, double y) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kTanh: return 1.0 - y * y;
    case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: return y * (1.0 - y);
    case Activation::kGelu: {
      const double t = std::tanh(GeluInner(x));
      const double du = std::sqrt(2.0 / std::numbers::pi) *
                        (1.0 + 3.0 * kGeluCoeff * x * x);
      return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
    }
  }
  return 1.0;
}

std::size_t Clamp(std::ptrdiff_t t, std::size_t rows) {
  if (t < 0) return 0;
  return std::min(static_cast<std::size_t>(t), rows - 1);
}

}  // namespace

Activation ParseActivation(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "gelu") return Activation::kGelu;
  Fail(ErrorKind::kConfig, "unknown activation '" + name + "'");
}

std::string ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kGelu: return "gelu";
  }
  return "identity";
}

double ActivationValue(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid: return Sigmoid(x);
    case Activation::kGelu: return 0.5 * x * (1.0 + std::tanh(GeluInner(x)));
  }
  return x;
}

Var MatMul(Var a, Var b) {
  Matrix out = MatMul(a.value(), b.value());
  return a.tape->Record(std::move(out), {a, b},
                        [a, b](Tape& tape, const Matrix& g) {
                          if (a.requires_grad())
                            MatMulNTAccumulate(g, b.value(), tape.grad(a));
                          if (b.requires_grad())
                            MatMulTNAccumulate(a.value(), g, tape.grad(b));
                        });
}

Var Add(Var a, Var b) {
  RequireSame(a.value(), b.value(), "add");
  Matrix out = a.value();
  out += b.value();
  return a.tape->Record(std::move(out), {a, b},
                        [a, b](Tape& tape, const Matrix& g) {
                          tape.AccumulateGrad(a, g);
                          tape.AccumulateGrad(b, g);
                        });
}

Var Sub(Var a, Var b) {
  RequireSame(a.value(), b.value(), "sub");
  Matrix out = a.value();
  out -= b.value();
  return a.tape->Record(std::move(out), {a, b},
                        [a, b](Tape& tape, const Matrix& g) {
                          tape.AccumulateGrad(a, g);
                          if (b.requires_grad()) tape.grad(b) -= g;
                        });
}

Var Mul(Var a, Var b) {
  RequireSame(a.value(), b.value(), "mul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return a.tape->Record(std::move(out), {a, b},
                        [a, b](Tape& tape, const Matrix& g) {
                          if (a.requires_grad()) {
                            Matrix& ga = tape.grad(a);
                            const Matrix& bv = b.value();
                            for (std::size_t i = 0; i < g.size(); ++i)
                              ga[i] += g[i] * bv[i];
                          }
                          if (b.requires_grad()) {
                            Matrix& gb = tape.grad(b);
                            const Matrix& av = a.value();
                            for (std::size_t i = 0; i < g.size(); ++i)
                              gb[i] += g[i] * av[i];
                          }
                        });
}

Var Scale(Var a, double s) {
  Matrix out = a.value();
  out *= s;
  return a.tape->Record(std::move(out), {a},
                        [a, s](Tape& tape, const Matrix& g) {
                          Matrix& ga = tape.grad(a);
                          for (std::size_t i = 0; i < g.size(); ++i)
                            ga[i] += s * g[i];
                        });
}

Var AddRow(Var x, Var b) {
  const Matrix& xv = x.value();
  const Matrix& bv = b.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    Fail(ErrorKind::kDimension, "add_row: bias " + bv.ShapeString() +
                                    " does not match input " +
                                    xv.ShapeString());
  }
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv[c];
  return x.tape->Record(std::move(out), {x, b},
                        [x, b](Tape& tape, const Matrix& g) {
                          tape.AccumulateGrad(x, g);
                          if (b.requires_grad()) {
                            Matrix& gb = tape.grad(b);
                            for (std::size_t r = 0; r < g.rows(); ++r)
                              for (std::size_t c = 0; c < g.cols(); ++c)
                                gb[c] += g(r, c);
                          }
                        });
}

Var ColumnAffine(Var x, const Matrix& shift, const Matrix& scale) {
  const Matrix& xv = x.value();
  if (shift.size() != xv.cols() || scale.size() != xv.cols())
    Fail(ErrorKind::kDimension, "column_affine: width mismatch");
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c)
      out(r, c) = (xv(r, c) - shift[c]) * scale[c];
  return x.tape->Record(std::move(out), {x},
                        [x, scale](Tape& tape, const Matrix& g) {
                          Matrix& gx = tape.grad(x);
                          for (std::size_t r = 0; r < g.rows(); ++r)
                            for (std::size_t c = 0; c < g.cols(); ++c)
                              gx(r, c) += g(r, c) * scale[c];
                        });
}

Var Activate(Var x, Activation a) {
  if (a == Activation::kIdentity) return x;
  const Matrix& xv = x.value();
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = ActivationValue(a, xv[i]);
  Matrix saved = x.requires_grad() ? out : Matrix();
  return x.tape->Record(
      std::move(out), {x},
      [x, a, saved = std::move(saved)](Tape& tape, const Matrix& g) {
        Matrix& gx = tape.grad(x);
        const Matrix& xv = x.value();
        for (std::size_t i = 0; i < g.size(); ++i)
          gx[i] += g[i] * ActivationDerivative(a, xv[i], saved[i]);
      });
}

Var Exp(Var x) {
  const Matrix& xv = x.value();
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(xv[i]);
  Matrix saved = x.requires_grad() ? out : Matrix();
  return x.tape->Record(std::move(out), {x},
                        [x, saved = std::move(saved)](Tape& tape,
                                                      const Matrix& g) {
                          Matrix& gx = tape.grad(x);
                          for (std::size_t i = 0; i < g.size(); ++i)
                            gx[i] += g[i] * saved[i];
                        });
}

Var LogFloor(Var x, double floor) {
  const Matrix& xv = x.value();
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = xv[i] + floor;
    if (!(v > 0.0))
      Fail(ErrorKind::kNumeric, "log of non-positive value at flat index " +
                                    std::to_string(i));
    out[i] = std::log(v);
  }
  return x.tape->Record(std::move(out), {x},
                        [x, floor](Tape& tape, const Matrix& g) {
                          Matrix& gx = tape.grad(x);
                          const Matrix& xv = x.value();
                          for (std::size_t i = 0; i < g.size(); ++i)
                            gx[i] += g[i] / (xv[i] + floor);
                        });
}

Var Sum(Var x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  Matrix out(1, 1, s);
  return x.tape->Record(std::move(out), {x},
                        [x](Tape& tape, const Matrix& g) {
                          Matrix& gx = tape.grad(x);
                          for (std::size_t i = 0; i < gx.size(); ++i)
                            gx[i] += g[0];
                        });
}

Var Mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) Fail(ErrorKind::kEmptySequence, "mean of empty matrix");
  return Scale(Sum(x), 1.0 / static_cast<double>(n));
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) Fail(ErrorKind::kDimension, "concat of nothing");
  std::vector<Matrix> values;
  values.reserve(parts.size());
  for (const Var& p : parts) values.push_back(p.value());
  Matrix out = HStack(values);
  return parts.front().tape->Record(
      std::move(out), parts, [parts](Tape& tape, const Matrix& g) {
        std::size_t c0 = 0;
        for (const Var& p : parts) {
          const std::size_t w = p.value().cols();
          if (p.requires_grad()) {
            Matrix& gp = tape.grad(p);
            for (std::size_t r = 0; r < g.rows(); ++r)
              for (std::size_t c = 0; c < w; ++c) gp(r, c) += g(r, c0 + c);
          }
          c0 += w;
        }
      });
}

Var SliceCols(Var x, std::size_t begin, std::size_t end) {
  Matrix out = x.value().ColRange(begin, end);
  return x.tape->Record(std::move(out), {x},
                        [x, begin, end](Tape& tape, const Matrix& g) {
                          Matrix& gx = tape.grad(x);
                          for (std::size_t r = 0; r < g.rows(); ++r)
                            for (std::size_t c = begin; c < end; ++c)
                              gx(r, c) += g(r, c - begin);
                        });
}

Matrix DeltaMatrix(const Matrix& x, std::size_t window) {
  const std::size_t rows = x.rows();
  Matrix out(rows, x.cols());
  if (rows == 0 || window == 0) return out;
  double denom = 0.0;
  for (std::size_t n = 1; n <= window; ++n)
    denom += static_cast<double>(n * n);
  denom *= 2.0;
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t n = 1; n <= window; ++n) {
      const auto ti = static_cast<std::ptrdiff_t>(t);
      const auto ni = static_cast<std::ptrdiff_t>(n);
      const std::size_t ahead = Clamp(ti + ni, rows);
      const std::size_t behind = Clamp(ti - ni, rows);
      const double w = static_cast<double>(n) / denom;
      for (std::size_t c = 0; c < x.cols(); ++c)
        out(t, c) += w * (x(ahead, c) - x(behind, c));
    }
  }
  return out;
}

Var DeltaTime(Var x, std::size_t window) {
  Matrix out = DeltaMatrix(x.value(), window);
  return x.tape->Record(
      std::move(out), {x}, [x, window](Tape& tape, const Matrix& g) {
        Matrix& gx = tape.grad(x);
        const std::size_t rows = g.rows();
        double denom = 0.0;
        for (std::size_t n = 1; n <= window; ++n)
          denom += static_cast<double>(n * n);
        denom *= 2.0;
        for (std::size_t t = 0; t < rows; ++t) {
          for (std::size_t n = 1; n <= window; ++n) {
            const auto ti = static_cast<std::ptrdiff_t>(t);
            const auto ni = static_cast<std::ptrdiff_t>(n);
            const std::size_t ahead = Clamp(ti + ni, rows);
            const std::size_t behind = Clamp(ti - ni, rows);
            const double w = static_cast<double>(n) / denom;
            for (std::size_t c = 0; c < g.cols(); ++c) {
              gx(ahead, c) += w * g(t, c);
              gx(behind, c) -= w * g(t, c);
            }
          }
        }
      });
}

Matrix StackContextMatrix(const Matrix& x, std::size_t window) {
  if (window % 2 == 0)
    Fail(ErrorKind::kConfig, "context window must be odd, got " +
                                 std::to_string(window));
  const std::size_t rows = x.rows();
  const std::size_t dim = x.cols();
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  Matrix out(rows, window * dim);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t k = 0; k < window; ++k) {
      const std::size_t src =
          Clamp(static_cast<std::ptrdiff_t>(t) - half +
                    static_cast<std::ptrdiff_t>(k),
                rows);
      for (std::size_t c = 0; c < dim; ++c) out(t, k * dim + c) = x(src, c);
    }
  }
  return out;
}

Var StackContext(Var x, std::size_t window) {
  if (window == 1) return x;
  Matrix out = StackContextMatrix(x.value(), window);
  return x.tape->Record(
      std::move(out), {x}, [x, window](Tape& tape, const Matrix& g) {
        Matrix& gx = tape.grad(x);
        const std::size_t rows = gx.rows();
        const std::size_t dim = gx.cols();
        const auto half = static_cast<std::ptrdiff_t>(window / 2);
        for (std::size_t t = 0; t < rows; ++t) {
          for (std::size_t k = 0; k < window; ++k) {
            const std::size_t src =
                Clamp(static_cast<std::ptrdiff_t>(t) - half +
                          static_cast<std::ptrdiff_t>(k),
                      rows);
            for (std::size_t c = 0; c < dim; ++c)
              gx(src, c) += g(t, k * dim + c);
          }
        }
      });
}

Var CosineDistanceLoss(Var z, Var y, double eps) {
  const Matrix& zv = z.value();
  const Matrix& yv = y.value();
  RequireSame(zv, yv, "cosine_distance_loss");
  const std::size_t frames = zv.rows();
  if (frames == 0) Fail(ErrorKind::kEmptySequence, "cosine loss on 0 frames");
  // Per-frame (dot, |z|, |y|) kept for the backward pass.
  Matrix stats(frames, 3);
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    double dot = 0.0, zz = 0.0, yy = 0.0;
    for (std::size_t c = 0; c < zv.cols(); ++c) {
      dot += zv(t, c) * yv(t, c);
      zz += zv(t, c) * zv(t, c);
      yy += yv(t, c) * yv(t, c);
    }
    stats(t, 0) = dot;
    stats(t, 1) = std::sqrt(zz);
    stats(t, 2) = std::sqrt(yy);
    total += 1.0 - dot / (stats(t, 1) * stats(t, 2) + eps);
  }
  Matrix out(1, 1, total / static_cast<double>(frames));
  return z.tape->Record(
      std::move(out), {z, y},
      [z, y, eps, stats = std::move(stats)](Tape& tape, const Matrix& g) {
        const Matrix& zv = z.value();
        const Matrix& yv = y.value();
        const double scale = g[0] / static_cast<double>(zv.rows());
        for (std::size_t t = 0; t < zv.rows(); ++t) {
          const double dot = stats(t, 0);
          const double nz = stats(t, 1);
          const double ny = stats(t, 2);
          const double d = nz * ny + eps;
          if (y.requires_grad()) {
            Matrix& gy = tape.grad(y);
            const double radial = ny > 0.0 ? dot * nz / (ny * d * d) : 0.0;
            for (std::size_t c = 0; c < zv.cols(); ++c)
              gy(t, c) += scale * (-zv(t, c) / d + radial * yv(t, c));
          }
          if (z.requires_grad()) {
            Matrix& gz = tape.grad(z);
            const double radial = nz > 0.0 ? dot * ny / (nz * d * d) : 0.0;
            for (std::size_t c = 0; c < zv.cols(); ++c)
              gz(t, c) += scale * (-yv(t, c) / d + radial * zv(t, c));
          }
        }
      });
}

Var MseLoss(Var prediction, Var target) {
  const Matrix& pv = prediction.value();
  const Matrix& tv = target.value();
  RequireSame(pv, tv, "mse_loss");
  if (pv.empty()) Fail(ErrorKind::kEmptySequence, "mse on empty matrix");
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - tv[i];
    total += d * d;
  }
  const double n = static_cast<double>(pv.size());
  Matrix out(1, 1, total / n);
  return prediction.tape->Record(
      std::move(out), {prediction, target},
      [prediction, target, n](Tape& tape, const Matrix& g) {
        const Matrix& pv = prediction.value();
        const Matrix& tv = target.value();
        const double s = 2.0 * g[0] / n;
        if (prediction.requires_grad()) {
          Matrix& gp = tape.grad(prediction);
          for (std::size_t i = 0; i < pv.size(); ++i)
            gp[i] += s * (pv[i] - tv[i]);
        }
        if (target.requires_grad()) {
          Matrix& gt = tape.grad(target);
          for (std::size_t i = 0; i < pv.size(); ++i)
            gt[i] -= s * (pv[i] - tv[i]);
        }
      });
}

Var SoftmaxCrossEntropy(Var logits, const std::vector<int>& labels) {
  const Matrix& lv = logits.value();
  if (labels.size() != lv.rows())
    Fail(ErrorKind::kDimension, "softmax_cross_entropy: " +
                                    std::to_string(labels.size()) +
                                    " labels for " + lv.ShapeString());
  if (lv.rows() == 0) Fail(ErrorKind::kEmptySequence, "no frames");
  Matrix probs(lv.rows(), lv.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < lv.rows(); ++r) {
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= lv.cols())
      Fail(ErrorKind::kDimension, "label out of range at row " +
                                      std::to_string(r));
    double peak = lv(r, 0);
    for (std::size_t c = 1; c < lv.cols(); ++c) peak = std::max(peak, lv(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < lv.cols(); ++c) {
      probs(r, c) = std::exp(lv(r, c) - peak);
      z += probs(r, c);
    }
    for (std::size_t c = 0; c < lv.cols(); ++c) probs(r, c) /= z;
    total -= std::log(probs(r, static_cast<std::size_t>(label)));
  }
  const double n = static_cast<double>(lv.rows());
  Matrix out(1, 1, total / n);
  return logits.tape->Record(
      std::move(out), {logits},
      [logits, labels, n, probs = std::move(probs)](Tape& tape,
                                                    const Matrix& g) {
        Matrix& gl = tape.grad(logits);
        const double s = g[0] / n;
        for (std::size_t r = 0; r < probs.rows(); ++r) {
          for (std::size_t c = 0; c < probs.cols(); ++c) {
            const double target =
                static_cast<int>(c) == labels[r] ? 1.0 : 0.0;
            gl(r, c) += s * (probs(r, c) - target);
          }
        }
      });
}

Var LstmDirection(Var x, Var w_ih, Var w_hh, Var b, bool reverse) {
  const Matrix& xv = x.value();
  const Matrix& wih = w_ih.value();
  const Matrix& whh = w_hh.value();
  const Matrix& bv = b.value();
  const std::size_t frames = xv.rows();
  if (frames == 0) Fail(ErrorKind::kEmptySequence, "lstm over 0 frames");
  const std::size_t hidden = whh.rows();
  RequireShape(wih, xv.cols(), 4 * hidden, "lstm w_ih");
  RequireShape(whh, hidden, 4 * hidden, "lstm w_hh");
  RequireShape(bv, 1, 4 * hidden, "lstm bias");

  // Activated gates per frame (i, f, g, o) and cell states.
  Matrix gates = MatMul(xv, wih);
  Matrix cells(frames, hidden);
  Matrix out(frames, hidden);
  Matrix h_prev(1, hidden);
  std::vector<double> c_prev(hidden, 0.0);
  Matrix recur(1, 4 * hidden);
  for (std::size_t step = 0; step < frames; ++step) {
    const std::size_t t = reverse ? frames - 1 - step : step;
    recur.Fill(0.0);
    if (step > 0) MatMulAccumulate(h_prev, whh, recur);
    auto gt = gates.row(t);
    for (std::size_t k = 0; k < 4 * hidden; ++k) gt[k] += bv[k] + recur[k];
    for (std::size_t j = 0; j < hidden; ++j) {
      const double ig = Sigmoid(gt[j]);
      const double fg = Sigmoid(gt[hidden + j]);
      const double cg = std::tanh(gt[2 * hidden + j]);
      const double og = Sigmoid(gt[3 * hidden + j]);
      gt[j] = ig;
      gt[hidden + j] = fg;
      gt[2 * hidden + j] = cg;
      gt[3 * hidden + j] = og;
      const double c = fg * c_prev[j] + ig * cg;
      cells(t, j) = c;
      c_prev[j] = c;
      const double h = og * std::tanh(c);
      out(t, j) = h;
      h_prev[j] = h;
    }
  }

  Matrix saved_out = out;
  return x.tape->Record(
      std::move(out), {x, w_ih, w_hh, b},
      [x, w_ih, w_hh, b, reverse, gates = std::move(gates),
       cells = std::move(cells),
       outs = std::move(saved_out)](Tape& tape, const Matrix& g) {
        const std::size_t frames = gates.rows();
        const std::size_t hidden = cells.cols();
        const Matrix& whh = w_hh.value();
        Matrix pre_grad(frames, 4 * hidden);
        Matrix dh_next(1, hidden);
        std::vector<double> dc_next(hidden, 0.0);
        Matrix da(1, 4 * hidden);
        for (std::size_t step = frames; step-- > 0;) {
          const std::size_t t = reverse ? frames - 1 - step : step;
          const bool has_prev = step > 0;
          const std::size_t tp = reverse ? t + 1 : t - 1;
          auto gt = gates.row(t);
          for (std::size_t j = 0; j < hidden; ++j) {
            const double ig = gt[j];
            const double fg = gt[hidden + j];
            const double cg = gt[2 * hidden + j];
            const double og = gt[3 * hidden + j];
            const double c = cells(t, j);
            const double tc = std::tanh(c);
            const double c_prev = has_prev ? cells(tp, j) : 0.0;
            const double dh = g(t, j) + dh_next[j];
            const double dc = dc_next[j] + dh * og * (1.0 - tc * tc);
            da[j] = dc * cg * ig * (1.0 - ig);
            da[hidden + j] = dc * c_prev * fg * (1.0 - fg);
            da[2 * hidden + j] = dc * ig * (1.0 - cg * cg);
            da[3 * hidden + j] = dh * tc * og * (1.0 - og);
            dc_next[j] = dc * fg;
          }
          auto pg = pre_grad.row(t);
          for (std::size_t k = 0; k < 4 * hidden; ++k) pg[k] = da[k];
          dh_next.Fill(0.0);
          if (has_prev) {
            MatMulNTAccumulate(da, whh, dh_next);
            if (w_hh.requires_grad()) {
              Matrix h_prev = outs.RowRange(tp, tp + 1);
              MatMulTNAccumulate(h_prev, da, tape.grad(w_hh));
            }
          }
        }
        if (x.requires_grad())
          MatMulNTAccumulate(pre_grad, w_ih.value(), tape.grad(x));
        if (w_ih.requires_grad())
          MatMulTNAccumulate(x.value(), pre_grad, tape.grad(w_ih));
        if (b.requires_grad()) {
          Matrix& gb = tape.grad(b);
          for (std::size_t t = 0; t < frames; ++t)
            for (std::size_t k = 0; k < 4 * hidden; ++k)
              gb[k] += pre_grad(t, k);
        }
      });
}

}  // namespace artimit
