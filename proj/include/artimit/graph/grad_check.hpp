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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "artimit/graph/tape.hpp"

namespace artimit {

/// Builds a scalar (1x1) loss on the given tape from the parameters.
using ScalarGraphFn = std::function<Var(Tape&, ParameterSet&)>;

struct GradCheckEntry {
  std::string name;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradCheckReport {
  /// Worst relative error per parameter name.
  std::map<std::string, double> max_relative_error;
  /// Coordinates whose relative error reached the tolerance.
  std::vector<GradCheckEntry> flagged;
  double worst = 0.0;
  bool passed = true;
};

/// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps coordinates
/// whose true gradient is ~0 from reporting round-off as failure.
double GradRelativeError(double analytic, double numeric, double floor);

/// Gradients of f by one reverse sweep, keyed by parameter name.
std::map<std::string, Matrix> AnalyticGradients(const ScalarGraphFn& f,
                                                ParameterSet& params);

/// Central differences of f around the current parameter values, compared to
/// `analytic`. Raises kContract if two evaluations at the same point differ.
GradCheckReport CompareGradients(const ScalarGraphFn& f, ParameterSet& params,
                                 const std::map<std::string, Matrix>& analytic,
                                 double h, double tol, double floor = 1e-5);

GradCheckReport GradCheck(const ScalarGraphFn& f, ParameterSet& params,
                          double h, double tol, double floor = 1e-5);

/// As CompareGradients, but checks at most `per_param` coordinates of each
/// parameter, drawn without replacement from `seed` (0 checks all).
GradCheckReport CompareGradientsSampled(const ScalarGraphFn& f, ParameterSet& params,
                                        const std::map<std::string, Matrix>& analytic,
                                        double h, double tol, std::size_t per_param,
                                        std::uint64_t seed, double floor = 1e-5);

GradCheckReport GradCheckSampled(const ScalarGraphFn& f, ParameterSet& params,
                                 double h, double tol, std::size_t per_param,
                                 std::uint64_t seed, double floor = 1e-5);

}  // namespace artimit
