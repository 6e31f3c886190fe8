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

// Feedforward articulatory synthesizer: [6 articulatory | 2 source] inputs,
// z-scored with frozen statistics, through 4 tanh layers of 512 units to 80
// log-mel values.

#pragma once

#include <cstdint>
#include <vector>

#include "artimit/graph/parameters.hpp"
#include "artimit/graph/tape.hpp"
#include "artimit/store/formats.hpp"

namespace artimit::synth {

inline constexpr std::size_t kNetInput = 8;
inline constexpr std::size_t kNetHidden = 512;
inline constexpr std::size_t kNetLayers = 4;
inline constexpr std::size_t kNetOutput = 80;

struct SynthesizerNet {
  /// Dense layers "l0".."l3", "out", plus frozen "input.shift" and
  /// "input.scale" (1 x 8).
  ParameterSet params;
  double train_loss = 0.0;
  double valid_loss = 0.0;
};

SynthesizerNet InitSynthesizerNet(std::uint64_t seed);

/// T x 6 articulatory (differentiable) and T x 2 source -> T x 80 log-mel.
Var SynthNetForward(Tape& tape, SynthesizerNet& net, Var artic,
                    const Matrix& source);
Matrix SynthNetPredict(SynthesizerNet& net, const Matrix& artic,
                       const Matrix& source);

struct SynthTrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double lr = 5e-4;
  std::uint64_t seed = 0;
};

struct SynthTrainData {
  Matrix artic;    // N x 6
  Matrix source;   // N x 2
  Matrix log_mel;  // N x 80
};

struct SynthTrainLog {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
};

/// Frame-level MSE regression. Input statistics are fitted on `train`.
/// Raises kDivergence naming the step when the loss becomes NaN.
SynthesizerNet TrainSynthesizer(const SynthTrainData& train,
                                const SynthTrainData& valid,
                                const SynthTrainConfig& cfg,
                                SynthTrainLog* log = nullptr);

double SynthNetMse(SynthesizerNet& net, const SynthTrainData& data);

store::Checkpoint SynthNetToCheckpoint(const SynthesizerNet& net);
SynthesizerNet SynthNetFromCheckpoint(const store::Checkpoint& c);

}  // namespace artimit::synth
