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

#include "artimit/synth/tract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "artimit/common/error.hpp"
#include "artimit/dsp/frontend.hpp"

namespace artimit::synth {
namespace {

constexpr std::size_t kBands = dsp::kNumMels;
constexpr std::size_t kDims = 6;
// Articulatory column driving each formant: JH, TD, TT, LP.
constexpr std::array<std::size_t, 4> kFormantParam = {0, 2, 3, 4};
constexpr std::size_t kTb = 1;
constexpr std::size_t kLh = 5;

// One frame: writes 80 outputs and, when `jac` is non-null, the 80 x 6
// Jacobian (row-major) of the outputs with respect to the frame.
void Frame(const double* a, double pp, double pc, const TractConfig& cfg,
           double* out, double* jac) {
  std::array<double, 4> center{}, dcenter{};
  for (std::size_t k = 0; k < 4; ++k) {
    const double raw = cfg.speaker_scale *
                       (cfg.formant_base[k] + cfg.formant_gain[k] * a[kFormantParam[k]]);
    const double f = std::clamp(raw, cfg.min_formant_hz, cfg.max_formant_hz);
    center[k] = dsp::MelBandCoordinate(f);
    const bool inside = raw > cfg.min_formant_hz && raw < cfg.max_formant_hz;
    dcenter[k] = inside ? dsp::MelBandCoordinateSlope(f) * cfg.speaker_scale *
                              cfg.formant_gain[k]
                        : 0.0;
  }
  const double th = std::tanh(a[kTb]);
  const double sigma = cfg.width_bins * (1.0 + cfg.width_tb_gain * th);
  const double dsigma = cfg.width_bins * cfg.width_tb_gain * (1.0 - th * th);
  const double amp = 1.0 / (1.0 + std::exp(-cfg.amplitude_slope * a[kLh]));
  const double damp = cfg.amplitude_slope * amp * (1.0 - amp);
  const double s2 = sigma * sigma;
  for (std::size_t m = 0; m < kBands; ++m) {
    const double md = static_cast<double>(m);
    const double ripple =
        pp > 0.0 ? 1.0 + cfg.ripple_depth * pc *
                             std::cos(2.0 * std::numbers::pi * md * pp / cfg.ripple_period)
                 : 1.0;
    double env = 0.0, denv_dsigma = 0.0;
    std::array<double, 4> denv_dc{};
    for (std::size_t k = 0; k < 4; ++k) {
      const double d = center[k] - md;
      const double e = cfg.peak_gain[k] * std::exp(-d * d / (2.0 * s2));
      env += e;
      denv_dsigma += e * d * d / (s2 * sigma);
      denv_dc[k] = -e * d / s2;
    }
    const double total = cfg.log_floor + amp * env * ripple;
    out[m] = std::log(total);
    if (jac == nullptr) continue;
    double* row = jac + m * kDims;
    std::fill(row, row + kDims, 0.0);
    const double inv = 1.0 / total;
    for (std::size_t k = 0; k < 4; ++k)
      row[kFormantParam[k]] += inv * amp * ripple * denv_dc[k] * dcenter[k];
    row[kTb] = inv * amp * ripple * denv_dsigma * dsigma;
    row[kLh] = inv * damp * env * ripple;
  }
}

void CheckInputs(const Matrix& artic, const Matrix& source, const TractConfig& cfg) {
  ValidateTractConfig(cfg);
  if (artic.cols() != kDims)
    Fail(ErrorKind::kDimension, "tract input must have 6 columns, got " +
                                    artic.ShapeString());
  RequireShape(source, artic.rows(), 2, "tract source");
  if (!artic.AllFinite())
    Fail(ErrorKind::kDomain, "articulatory input contains non-finite values");
  ValidateSource(source);
}

}  // namespace

void ValidateTractConfig(const TractConfig& cfg) {
  if (!(cfg.speaker_scale >= kMinSpeakerScale && cfg.speaker_scale <= kMaxSpeakerScale))
    Fail(ErrorKind::kConfig, "speaker_scale must lie in [0.8, 1.25], got " +
                                 std::to_string(cfg.speaker_scale));
  if (!(cfg.width_bins > 0.0) || !(std::abs(cfg.width_tb_gain) < 1.0))
    Fail(ErrorKind::kConfig, "tract peak width must stay positive");
  if (!(cfg.min_formant_hz > 0.0 && cfg.min_formant_hz < cfg.max_formant_hz))
    Fail(ErrorKind::kConfig, "invalid formant clamp range");
  if (!(cfg.log_floor > 0.0)) Fail(ErrorKind::kConfig, "log floor must be positive");
}

void ValidateSource(const Matrix& source) {
  if (source.cols() != 2)
    Fail(ErrorKind::kDimension, "source frames must have 2 columns");
  for (std::size_t t = 0; t < source.rows(); ++t) {
    const double pp = source(t, 0), pc = source(t, 1);
    const bool pp_ok = pp == 0.0 || (pp >= static_cast<double>(dsp::kMinPitchLag) &&
                                     pp <= static_cast<double>(dsp::kMaxPitchLag));
    if (!pp_ok)
      Fail(ErrorKind::kDomain, "frame " + std::to_string(t) + ": pitch period " +
                                   std::to_string(pp) + " outside {0} U [80, 320]");
    if (!(pc >= 0.0 && pc <= 1.0))
      Fail(ErrorKind::kDomain, "frame " + std::to_string(t) + ": pitch coefficient " +
                                   std::to_string(pc) + " outside [0, 1]");
  }
}

std::array<double, 4> Formants(std::span<const double> a, const TractConfig& cfg) {
  std::array<double, 4> f{};
  for (std::size_t k = 0; k < 4; ++k)
    f[k] = std::clamp(cfg.speaker_scale *
                          (cfg.formant_base[k] + cfg.formant_gain[k] * a[kFormantParam[k]]),
                      cfg.min_formant_hz, cfg.max_formant_hz);
  return f;
}

Matrix TractForward(const Matrix& artic, const Matrix& source,
                    const TractConfig& cfg) {
  CheckInputs(artic, source, cfg);
  Matrix out(artic.rows(), kBands);
  for (std::size_t t = 0; t < artic.rows(); ++t)
    Frame(artic.row(t).data(), source(t, 0), source(t, 1), cfg, out.row(t).data(),
          nullptr);
  return out;
}

Var TractForward(Var artic, const Matrix& source, const TractConfig& cfg) {
  const Matrix& a = artic.value();
  CheckInputs(a, source, cfg);
  const std::size_t t_count = a.rows();
  Matrix out(t_count, kBands);
  const bool need = artic.requires_grad();
  std::vector<double> jac(need ? t_count * kBands * kDims : 0);
  for (std::size_t t = 0; t < t_count; ++t)
    Frame(a.row(t).data(), source(t, 0), source(t, 1), cfg, out.row(t).data(),
          need ? jac.data() + t * kBands * kDims : nullptr);
  return artic.tape->Record(
      std::move(out), {artic},
      [artic, jac = std::move(jac), t_count](Tape& tape, const Matrix& g) {
        Matrix& ga = tape.grad(artic);
        for (std::size_t t = 0; t < t_count; ++t) {
          const double* jt = jac.data() + t * kBands * kDims;
          for (std::size_t m = 0; m < kBands; ++m) {
            const double gm = g(t, m);
            if (gm == 0.0) continue;
            for (std::size_t j = 0; j < kDims; ++j) ga(t, j) += gm * jt[m * kDims + j];
          }
        }
      });
}

Matrix VtlnWarp(const Matrix& log_mel, double scale) {
  if (log_mel.cols() != kBands)
    Fail(ErrorKind::kDimension, "VTLN expects 80 mel bands");
  if (!(scale >= kMinSpeakerScale && scale <= kMaxSpeakerScale))
    Fail(ErrorKind::kConfig, "VTLN scale must lie in [0.8, 1.25]");
  std::array<std::size_t, kBands> lo{};
  std::array<double, kBands> frac{};
  for (std::size_t m = 0; m < kBands; ++m) {
    const double x = std::clamp(dsp::MelBandCoordinate(scale * dsp::MelBandCenterHz(m)),
                                0.0, static_cast<double>(kBands - 1));
    lo[m] = std::min(static_cast<std::size_t>(x), kBands - 2);
    frac[m] = x - static_cast<double>(lo[m]);
  }
  Matrix out(log_mel.rows(), kBands);
  for (std::size_t t = 0; t < log_mel.rows(); ++t)
    for (std::size_t m = 0; m < kBands; ++m)
      out(t, m) = (1.0 - frac[m]) * log_mel(t, lo[m]) + frac[m] * log_mel(t, lo[m] + 1);
  return out;
}

}  // namespace artimit::synth
