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

#include <random>
#include <string>

#include "artimit/graph/ops.hpp"
#include "artimit/graph/parameters.hpp"

namespace artimit {

/// Adds "<prefix>.weight" (in x out) and "<prefix>.bias" (1 x out), uniform in
/// [-1/sqrt(in), 1/sqrt(in)].
void AddDenseParams(ParameterSet& params, const std::string& prefix,
                    std::size_t in, std::size_t out, std::mt19937_64& rng);

/// y = act(x W + b). Rejects non-finite x and mismatched shapes.
Var DenseForward(Tape& tape, Var x, ParameterSet& params,
                 const std::string& prefix, Activation activation);

/// Parameter names of one LSTM direction: "<prefix>.l<layer>.<fwd|bwd>.<w_ih|w_hh|b>".
std::string LstmParamName(const std::string& prefix, std::size_t layer,
                          bool backward, const std::string& leaf);

/// Bidirectional LSTM weights, uniform in [-1/sqrt(hidden), 1/sqrt(hidden)].
void AddBiLstmParams(ParameterSet& params, const std::string& prefix,
                     std::size_t input_dim, std::size_t layers,
                     std::size_t hidden, std::mt19937_64& rng);

/// Stacked bidirectional LSTM; each layer outputs [forward | backward]
/// (T x 2*hidden) and feeds the next layer.
Var BiLstmForward(Tape& tape, Var x, ParameterSet& params,
                  const std::string& prefix, std::size_t layers,
                  std::size_t hidden);

}  // namespace artimit
