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

#include "artimit/graph/optimizer.hpp"

#include <cmath>

#include "artimit/common/error.hpp"

namespace artimit {

void AdamStep(ParameterSet& params, OptimizerState& state) {
  if (!(state.lr > 0.0))
    Fail(ErrorKind::kState, "adam: learning rate must be positive");
  for (const auto& [name, p] : params) {
    if (!p.trainable) continue;
    if (!p.grad_ready || !p.grad.SameShape(p.value))
      Fail(ErrorKind::kState, "adam: missing gradient for '" + name + "'");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, p] : params) {
    if (!p.trainable) continue;
    AdamMoments& m = state.moments[name];
    if (!m.first.SameShape(p.value)) {
      m.first = Matrix(p.value.rows(), p.value.cols());
      m.second = Matrix(p.value.rows(), p.value.cols());
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m.first[i] = state.beta1 * m.first[i] + (1.0 - state.beta1) * g;
      m.second[i] = state.beta2 * m.second[i] + (1.0 - state.beta2) * g * g;
      const double mh = m.first[i] / bc1;
      const double vh = m.second[i] / bc2;
      p.value[i] -= state.lr * mh / (std::sqrt(vh) + state.eps);
    }
    p.grad.Fill(0.0);
    p.grad_ready = false;
  }
}

void AddWeightDecay(ParameterSet& params, double decay) {
  for (auto& [name, p] : params) {
    if (!p.trainable || !p.grad.SameShape(p.value)) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i)
      p.grad[i] += decay * p.value[i];
  }
}

}  // namespace artimit
