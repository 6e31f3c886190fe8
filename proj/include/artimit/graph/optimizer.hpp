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
#include <map>
#include <string>

#include "artimit/graph/parameters.hpp"

namespace artimit {

struct AdamMoments {
  Matrix first;
  Matrix second;
};

struct OptimizerState {
  explicit OptimizerState(double learning_rate = 1e-3)
      : lr(learning_rate) {}

  std::map<std::string, AdamMoments> moments;
  std::uint64_t step = 0;
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update over every trainable entry of `params`.
/// Every trainable gradient slot must be populated (by a backward pass or
/// ZeroGrad); slots are zeroed and marked consumed afterwards.
void AdamStep(ParameterSet& params, OptimizerState& state);

/// Adds decay * value to each trainable gradient (L2 penalty).
void AddWeightDecay(ParameterSet& params, double decay);

}  // namespace artimit
