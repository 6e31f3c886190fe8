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

// Analytic vocal tract: each articulatory parameter drives one acoustic
// degree of freedom of an 80-band log-mel frame (JH, TD, TT, LP -> F1..F4,
// TB -> peak width, LH -> amplitude), with a harmonic ripple from the source.

#pragma once

#include <array>

#include "artimit/graph/matrix.hpp"
#include "artimit/graph/tape.hpp"

namespace artimit::synth {

struct TractConfig {
  std::array<double, 4> formant_base = {500.0, 1500.0, 2500.0, 3500.0};
  /// Hz per unit of JH, TD, TT, LP respectively.
  std::array<double, 4> formant_gain = {200.0, 350.0, 250.0, 250.0};
  std::array<double, 4> peak_gain = {1.0, 0.7, 0.5, 0.3};
  double width_bins = 3.0;
  double width_tb_gain = 0.3;
  double amplitude_slope = 2.0;
  double ripple_depth = 0.3;
  double ripple_period = 320.0;
  double min_formant_hz = 100.0;
  double max_formant_hz = 7500.0;
  double log_floor = 1e-10;
  double speaker_scale = 1.0;
};

inline constexpr double kMinSpeakerScale = 0.8;
inline constexpr double kMaxSpeakerScale = 1.25;

void ValidateTractConfig(const TractConfig& cfg);
/// T x 2 source frames: PP in {0} U [80, 320], PC in [0, 1]; raises kDomain.
void ValidateSource(const Matrix& source);

/// Formant frequencies F1..F4 (Hz, clamped) for one articulatory frame.
std::array<double, 4> Formants(std::span<const double> a, const TractConfig& cfg);

/// T x 6 articulatory frames and T x 2 source frames -> T x 80 log-mel.
Matrix TractForward(const Matrix& artic, const Matrix& source,
                    const TractConfig& cfg);
/// Differentiable with respect to `artic`.
Var TractForward(Var artic, const Matrix& source, const TractConfig& cfg);

/// Vocal-tract-length normalization of log-mel frames from a speaker whose
/// formants are scaled by `scale`: band m takes the value found at
/// frequency scale * center(m), linearly interpolated across bands and held
/// at the edges.
Matrix VtlnWarp(const Matrix& log_mel, double scale);

}  // namespace artimit::synth
