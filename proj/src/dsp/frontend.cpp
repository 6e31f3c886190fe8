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

#include "artimit/dsp/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "artimit/common/error.hpp"
#include "artimit/graph/ops.hpp"

namespace artimit::dsp {
namespace {

constexpr double kBinHz =
    static_cast<double>(kSampleRate) / static_cast<double>(kFrameLength);

double MelStep() {
  return (HzToMel(kMelMaxHz) - HzToMel(kMelMinHz)) /
         static_cast<double>(kNumMels + 1);
}

struct DftTables {
  Matrix cos_table;  // 640 x 321, Hann window folded in
  Matrix sin_table;
};

const DftTables& Tables() {
  static const DftTables tables = [] {
    DftTables t{Matrix(kFrameLength, kNumBins), Matrix(kFrameLength, kNumBins)};
    const double n_total = static_cast<double>(kFrameLength);
    for (std::size_t n = 0; n < kFrameLength; ++n) {
      // Periodic Hann window.
      const double w =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                               static_cast<double>(n) / n_total);
      for (std::size_t k = 0; k < kNumBins; ++k) {
        // Reduce n*k modulo the frame length before scaling to keep the
        // argument small.
        const double phase = 2.0 * std::numbers::pi *
                             static_cast<double>((n * k) % kFrameLength) /
                             n_total;
        t.cos_table(n, k) = w * std::cos(phase);
        t.sin_table(n, k) = -w * std::sin(phase);
      }
    }
    return t;
  }();
  return tables;
}

Matrix FrameMatrix(const Waveform& w) {
  const std::size_t frames = FrameCount(w.samples.size());
  Matrix out(frames, kFrameLength);
  for (std::size_t t = 0; t < frames; ++t)
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(t * kHop),
                kFrameLength, out.row(t).begin());
  return out;
}

}  // namespace

std::string FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc39: return "mfcc39";
    case FeatureKind::kLogMel80: return "logmel80";
    case FeatureKind::kExternal: return "external";
  }
  return "external";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "mfcc39") return FeatureKind::kMfcc39;
  if (name == "logmel80") return FeatureKind::kLogMel80;
  if (name == "external") return FeatureKind::kExternal;
  Fail(ErrorKind::kConfig, "unknown feature kind '" + name + "'");
}

void ValidateFeatures(const FeatureSequence& f) {
  if (!(f.frame_rate > 0.0))
    Fail(ErrorKind::kSchema, "feature frame rate must be positive");
  if (f.kind == FeatureKind::kMfcc39 && f.dim() != kMfccDim)
    Fail(ErrorKind::kSchema, "mfcc39 features must have 39 columns, got " +
                                 std::to_string(f.dim()));
  if (f.kind == FeatureKind::kLogMel80 && f.dim() != kNumMels)
    Fail(ErrorKind::kSchema, "logmel80 features must have 80 columns, got " +
                                 std::to_string(f.dim()));
  if (f.kind != FeatureKind::kExternal && f.frame_rate != kFrameRate)
    Fail(ErrorKind::kSchema, "internal feature kinds run at 50 Hz");
}

void ValidateWaveform(const Waveform& w) {
  if (w.sample_rate != kSampleRate)
    Fail(ErrorKind::kUnsupportedFormat,
         "sample rate " + std::to_string(w.sample_rate) +
             " Hz is not supported; expected 16000 Hz");
  if (w.samples.empty())
    Fail(ErrorKind::kInputTooShort, "empty waveform");
}

std::size_t FrameCount(std::size_t num_samples) {
  if (num_samples < kFrameLength) return 0;
  return 1 + (num_samples - kFrameLength) / kHop;
}

Matrix StftMagnitude(const Waveform& w) {
  ValidateWaveform(w);
  if (w.samples.size() < kFrameLength)
    Fail(ErrorKind::kInputTooShort,
         "waveform of " + std::to_string(w.samples.size()) +
             " samples is shorter than one 640-sample frame");
  const Matrix frames = FrameMatrix(w);
  const DftTables& tables = Tables();
  const Matrix re = MatMul(frames, tables.cos_table);
  const Matrix im = MatMul(frames, tables.sin_table);
  Matrix mag(re.rows(), re.cols());
  for (std::size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::hypot(re[i], im[i]);
  return mag;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double MelBandCenterHz(std::size_t band) {
  return MelToHz(HzToMel(kMelMinHz) +
                 static_cast<double>(band + 1) * MelStep());
}

double MelBandCoordinate(double hz) {
  return (HzToMel(hz) - HzToMel(kMelMinHz)) / MelStep() - 1.0;
}

double MelBandCoordinateSlope(double hz) {
  return 2595.0 / (std::numbers::ln10 * (700.0 + hz)) / MelStep();
}

const Matrix& MelFilterbank() {
  static const Matrix bank = [] {
    Matrix fb(kNumBins, kNumMels);
    for (std::size_t m = 0; m < kNumMels; ++m) {
      const double left = m == 0 ? kMelMinHz : MelBandCenterHz(m - 1);
      const double center = MelBandCenterHz(m);
      const double right = MelBandCenterHz(m + 1);
      for (std::size_t k = 0; k < kNumBins; ++k) {
        const double f = static_cast<double>(k) * kBinHz;
        double weight = 0.0;
        if (f > left && f <= center) {
          weight = (f - left) / (center - left);
        } else if (f > center && f < right) {
          weight = (right - f) / (right - center);
        }
        fb(k, m) = weight;
      }
    }
    return fb;
  }();
  return bank;
}

const Matrix& DctBasis() {
  static const Matrix basis = [] {
    Matrix d(kNumMels, kNumCeps);
    const double m_total = static_cast<double>(kNumMels);
    for (std::size_t n = 0; n < kNumCeps; ++n) {
      const double scale =
          n == 0 ? std::sqrt(1.0 / m_total) : std::sqrt(2.0 / m_total);
      for (std::size_t m = 0; m < kNumMels; ++m) {
        d(m, n) = scale * std::cos(std::numbers::pi * static_cast<double>(n) *
                                   (static_cast<double>(m) + 0.5) / m_total);
      }
    }
    return d;
  }();
  return basis;
}

MelSpectrogram MelProject(const Matrix& spectrum) {
  if (spectrum.cols() != kNumBins)
    Fail(ErrorKind::kDimension, "mel projection expects 321 bins, got " +
                                    std::to_string(spectrum.cols()));
  Matrix power(spectrum.rows(), spectrum.cols());
  for (std::size_t i = 0; i < power.size(); ++i)
    power[i] = spectrum[i] * spectrum[i];
  return MelSpectrogram{MatMul(power, MelFilterbank()), kFrameRate};
}

FeatureSequence LogMelFeatures(const MelSpectrogram& mel) {
  RequireShape(mel.energies, mel.energies.rows(), kNumMels, "mel energies");
  Matrix out(mel.energies.rows(), kNumMels);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::log(mel.energies[i] + kLogFloor);
  return FeatureSequence{std::move(out), kFrameRate, FeatureKind::kLogMel80};
}

FeatureSequence LogMel80(const Waveform& w) {
  return LogMelFeatures(MelProject(StftMagnitude(w)));
}

Matrix CepstraFromLogMel(const Matrix& log_mel) {
  if (log_mel.cols() != kNumMels)
    Fail(ErrorKind::kDimension, "cepstra expect 80 mel bands, got " +
                                    std::to_string(log_mel.cols()));
  return MatMul(log_mel, DctBasis());
}

Matrix CepstraFromMel(const Matrix& mel_energies) {
  Matrix logs(mel_energies.rows(), mel_energies.cols());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    if (mel_energies[i] < 0.0)
      Fail(ErrorKind::kDomain, "negative mel energy");
    logs[i] = std::log(mel_energies[i] + kLogFloor);
  }
  return CepstraFromLogMel(logs);
}

void ValidateStats(const CepstralStats& stats) {
  if (stats.mean.size() != kNumCeps || stats.stddev.size() != kNumCeps)
    Fail(ErrorKind::kNormalization, "cepstral stats must have 13 entries");
  for (std::size_t c = 0; c < kNumCeps; ++c) {
    if (!(stats.stddev[c] > 0.0) || !std::isfinite(stats.stddev[c]))
      Fail(ErrorKind::kNormalization,
           "degenerate std for cepstral coefficient " + std::to_string(c));
  }
}

CepstralStats FitCepstralStats(const std::vector<Matrix>& cepstra) {
  std::vector<double> sum(kNumCeps, 0.0);
  std::size_t count = 0;
  for (const Matrix& c : cepstra) {
    if (c.cols() != kNumCeps)
      Fail(ErrorKind::kDimension, "cepstra must have 13 columns");
    for (std::size_t t = 0; t < c.rows(); ++t)
      for (std::size_t k = 0; k < kNumCeps; ++k) sum[k] += c(t, k);
    count += c.rows();
  }
  if (count == 0) Fail(ErrorKind::kNormalization, "no frames to fit stats on");
  CepstralStats stats{std::vector<double>(kNumCeps),
                      std::vector<double>(kNumCeps)};
  const double n = static_cast<double>(count);
  for (std::size_t k = 0; k < kNumCeps; ++k) stats.mean[k] = sum[k] / n;
  std::vector<double> sq(kNumCeps, 0.0);
  for (const Matrix& c : cepstra)
    for (std::size_t t = 0; t < c.rows(); ++t)
      for (std::size_t k = 0; k < kNumCeps; ++k) {
        const double d = c(t, k) - stats.mean[k];
        sq[k] += d * d;
      }
  for (std::size_t k = 0; k < kNumCeps; ++k) {
    stats.stddev[k] = std::sqrt(sq[k] / n);
    // Relative cutoff: a constant column leaves only round-off behind.
    if (stats.stddev[k] <= 1e-12 * std::max(1.0, std::abs(stats.mean[k])))
      Fail(ErrorKind::kNormalization,
           "degenerate std for cepstral coefficient " + std::to_string(k));
  }
  return stats;
}

Matrix DeltaFeatures(const Matrix& x, std::size_t window) {
  return DeltaMatrix(x, window);
}

Matrix AssembleMfcc(const Matrix& cepstra, const CepstralStats& stats) {
  ValidateStats(stats);
  Matrix z(cepstra.rows(), kNumCeps);
  for (std::size_t t = 0; t < cepstra.rows(); ++t)
    for (std::size_t k = 0; k < kNumCeps; ++k)
      z(t, k) = (cepstra(t, k) - stats.mean[k]) * (1.0 / stats.stddev[k]);
  Matrix d = DeltaMatrix(z, kDeltaWindow);
  Matrix dd = DeltaMatrix(d, kDeltaWindow);
  return HStack({z, d, dd});
}

FeatureSequence Mfcc39(const Waveform& w,
                       const std::optional<CepstralStats>& stats) {
  const Matrix cepstra =
      CepstraFromMel(MelProject(StftMagnitude(w)).energies);
  const CepstralStats s = stats ? *stats : FitCepstralStats({cepstra});
  return FeatureSequence{AssembleMfcc(cepstra, s), kFrameRate,
                         FeatureKind::kMfcc39};
}

FeatureSequence MfccFromMel(const MelSpectrogram& mel,
                            const CepstralStats& stats) {
  return FeatureSequence{AssembleMfcc(CepstraFromMel(mel.energies), stats),
                         kFrameRate, FeatureKind::kMfcc39};
}

Var MfccFromLogMel(Var log_mel, const CepstralStats& stats) {
  ValidateStats(stats);
  if (log_mel.value().cols() != kNumMels)
    Fail(ErrorKind::kDimension, "mfcc path expects 80 mel bands");
  Tape& tape = *log_mel.tape;
  Var cepstra = MatMul(log_mel, tape.ConstantRef(DctBasis()));
  Matrix shift(1, kNumCeps), scale(1, kNumCeps);
  for (std::size_t k = 0; k < kNumCeps; ++k) {
    shift[k] = stats.mean[k];
    scale[k] = 1.0 / stats.stddev[k];
  }
  Var z = ColumnAffine(cepstra, shift, scale);
  Var d = DeltaTime(z, kDeltaWindow);
  Var dd = DeltaTime(d, kDeltaWindow);
  return ConcatCols({z, d, dd});
}

Var MfccFromMel(Var mel, const CepstralStats& stats) {
  for (double v : mel.value().values())
    if (v < 0.0) Fail(ErrorKind::kDomain, "negative mel energy");
  return MfccFromLogMel(LogFloor(mel, kLogFloor), stats);
}

SourceTrack ExtractSource(const Waveform& w) {
  ValidateWaveform(w);
  const std::size_t frames = FrameCount(w.samples.size());
  SourceTrack track{Matrix(frames, 2)};
  std::vector<double> corr(kMaxPitchLag + 1, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* x = w.samples.data() + t * kHop;
    double energy = 0.0;
    for (std::size_t n = 0; n < kFrameLength; ++n) energy += x[n] * x[n];
    energy /= static_cast<double>(kFrameLength);
    if (energy < kSilenceEnergy) continue;

    double peak = -1.0;
    for (std::size_t lag = kMinPitchLag; lag <= kMaxPitchLag; ++lag) {
      double num = 0.0, head = 0.0, tail = 0.0;
      for (std::size_t n = 0; n + lag < kFrameLength; ++n) {
        num += x[n] * x[n + lag];
        head += x[n] * x[n];
        tail += x[n + lag] * x[n + lag];
      }
      const double denom = std::sqrt(head * tail);
      corr[lag] = denom > 0.0 ? num / denom : 0.0;
      peak = std::max(peak, corr[lag]);
    }
    // Smallest-lag local maximum within 10% of the global peak; a strictly
    // periodic frame correlates equally well at multiples of its period.
    std::size_t best = kMinPitchLag;
    for (std::size_t lag = kMinPitchLag; lag <= kMaxPitchLag; ++lag) {
      const bool left_ok = lag == kMinPitchLag || corr[lag] >= corr[lag - 1];
      const bool right_ok = lag == kMaxPitchLag || corr[lag] >= corr[lag + 1];
      if (left_ok && right_ok && corr[lag] >= 0.9 * peak) {
        best = lag;
        break;
      }
    }
    const double pc = std::clamp(corr[best], 0.0, 1.0);
    if (corr[best] < kVoicingThreshold) continue;
    track.frames(t, 0) = static_cast<double>(best);
    track.frames(t, 1) = pc;
  }
  return track;
}

}  // namespace artimit::dsp
