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

#include "artimit/graph/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "artimit/common/error.hpp"

namespace artimit {
namespace {

double Evaluate(const ScalarGraphFn& f, ParameterSet& params) {
  Tape tape;
  Var out = f(tape, params);
  const Matrix& v = out.value();
  if (v.rows() != 1 || v.cols() != 1)
    Fail(ErrorKind::kDimension, "grad_check: f must return a 1x1 value");
  return v[0];
}

}  // namespace

double GradRelativeError(double analytic, double numeric, double floor) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

std::map<std::string, Matrix> AnalyticGradients(const ScalarGraphFn& f,
                                                ParameterSet& params) {
  params.ZeroGrad();
  Tape tape;
  tape.Backward(f(tape, params));
  std::map<std::string, Matrix> grads;
  for (auto& [name, p] : params) {
    if (p.trainable) grads.emplace(name, p.grad);
  }
  params.ZeroGrad();
  return grads;
}

GradCheckReport CompareGradients(const ScalarGraphFn& f, ParameterSet& params,
                                 const std::map<std::string, Matrix>& analytic,
                                 double h, double tol, double floor) {
  return CompareGradientsSampled(f, params, analytic, h, tol, 0, 0, floor);
}

GradCheckReport CompareGradientsSampled(const ScalarGraphFn& f, ParameterSet& params,
                                        const std::map<std::string, Matrix>& analytic,
                                        double h, double tol, std::size_t per_param,
                                        std::uint64_t seed, double floor) {
  if (!(h >= 1e-6 && h <= 1e-3))
    Fail(ErrorKind::kContract, "grad_check: step must lie in [1e-6, 1e-3]");
  const double base = Evaluate(f, params);
  if (Evaluate(f, params) != base)
    Fail(ErrorKind::kContract,
         "grad_check: f is not deterministic (two forward passes differ)");

  GradCheckReport report;
  for (auto& [name, p] : params) {
    if (!p.trainable) continue;
    auto it = analytic.find(name);
    if (it == analytic.end() || !it->second.SameShape(p.value))
      Fail(ErrorKind::kState, "grad_check: no analytic gradient for '" +
                                  name + "'");
    std::vector<std::size_t> coords(p.value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (per_param > 0 && per_param < coords.size()) {
      std::mt19937_64 rng(seed ^ std::hash<std::string>{}(name));
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(per_param);
      std::sort(coords.begin(), coords.end());
    }
    double worst = 0.0;
    for (std::size_t i : coords) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double up = Evaluate(f, params);
      p.value[i] = saved - h;
      const double down = Evaluate(f, params);
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = it->second[i];
      const double rel = GradRelativeError(a, numeric, floor);
      worst = std::max(worst, rel);
      if (rel >= tol) report.flagged.push_back({name, i, a, numeric, rel});
    }
    report.max_relative_error[name] = worst;
    report.worst = std::max(report.worst, worst);
  }
  report.passed = report.flagged.empty();
  return report;
}

GradCheckReport GradCheck(const ScalarGraphFn& f, ParameterSet& params,
                          double h, double tol, double floor) {
  return CompareGradients(f, params, AnalyticGradients(f, params), h, tol,
                          floor);
}

GradCheckReport GradCheckSampled(const ScalarGraphFn& f, ParameterSet& params,
                                 double h, double tol, std::size_t per_param,
                                 std::uint64_t seed, double floor) {
  return CompareGradientsSampled(f, params, AnalyticGradients(f, params), h, tol,
                                 per_param, seed, floor);
}

}  // namespace artimit
