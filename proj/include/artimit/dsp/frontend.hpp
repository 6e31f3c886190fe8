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

// Speech front end at 16 kHz: 640-sample Hann frames with a 320-sample hop
// (one frame every 20 ms), 80 HTK-mel bands over 0-8 kHz, 13 cepstra with
// regression deltas, and autocorrelation pitch/harmonicity.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "artimit/graph/matrix.hpp"
#include "artimit/graph/tape.hpp"

namespace artimit::dsp {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kFrameLength = 640;
inline constexpr std::size_t kHop = 320;
inline constexpr std::size_t kNumBins = kFrameLength / 2 + 1;  // 321
inline constexpr std::size_t kNumMels = 80;
inline constexpr double kMelMinHz = 0.0;
inline constexpr double kMelMaxHz = 8000.0;
inline constexpr std::size_t kNumCeps = 13;
inline constexpr std::size_t kMfccDim = 3 * kNumCeps;  // 39
inline constexpr double kLogFloor = 1e-10;
inline constexpr std::size_t kDeltaWindow = 2;
inline constexpr double kFrameRate =
    static_cast<double>(kSampleRate) / static_cast<double>(kHop);  // 50 Hz

// Pitch search: 50-200 Hz at 16 kHz.
inline constexpr std::size_t kMinPitchLag = 80;
inline constexpr std::size_t kMaxPitchLag = 320;
inline constexpr double kVoicingThreshold = 0.3;
inline constexpr double kSilenceEnergy = 1e-6;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
};

enum class FeatureKind { kMfcc39 = 0, kLogMel80 = 1, kExternal = 2 };

std::string FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string& name);

/// Time-major representation vectors at a fixed frame rate.
struct FeatureSequence {
  Matrix frames;
  double frame_rate = kFrameRate;
  FeatureKind kind = FeatureKind::kExternal;

  std::size_t dim() const { return frames.cols(); }
  std::size_t num_frames() const { return frames.rows(); }
};

/// Throws kSchema when an internal kind carries the wrong width or rate.
void ValidateFeatures(const FeatureSequence& f);

/// T x 80 nonnegative filterbank energies.
struct MelSpectrogram {
  Matrix energies;
  double frame_rate = kFrameRate;
};

/// T x 2: pitch period in samples (0 when unvoiced) and harmonicity in [0, 1].
struct SourceTrack {
  Matrix frames;
};

/// Per-coefficient z-scoring statistics for the 13 static cepstra.
struct CepstralStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Requires 16 kHz and a non-empty signal; raises kUnsupportedFormat or
/// kInputTooShort.
void ValidateWaveform(const Waveform& w);

/// 1 + floor((n - 640) / 320); zero when n < 640.
std::size_t FrameCount(std::size_t num_samples);

/// |DFT| of Hann-windowed frames, T x 321. Trailing partial frames are dropped.
Matrix StftMagnitude(const Waveform& w);

double HzToMel(double hz);
double MelToHz(double mel);
/// Center frequency of band m (0-based) of the filterbank.
double MelBandCenterHz(std::size_t band);
/// Continuous band coordinate of a frequency: band index whose center equals
/// `hz`, interpolated on the mel scale.
double MelBandCoordinate(double hz);
/// d MelBandCoordinate / d hz.
double MelBandCoordinateSlope(double hz);

/// 321 x 80 triangular filter weights (HTK, unnormalized).
const Matrix& MelFilterbank();
/// 80 x 13 orthonormal DCT-II basis.
const Matrix& DctBasis();

/// Filter-weighted sums of squared magnitudes.
MelSpectrogram MelProject(const Matrix& spectrum);

/// log(mel + 1e-10) as a logmel80 feature sequence.
FeatureSequence LogMelFeatures(const MelSpectrogram& mel);
FeatureSequence LogMel80(const Waveform& w);

/// 13 static cepstra (log floor, DCT-II) per frame.
Matrix CepstraFromMel(const Matrix& mel_energies);
Matrix CepstraFromLogMel(const Matrix& log_mel);

/// Population mean/std per coefficient over all frames of all inputs. Raises
/// kNormalization naming the coefficient when a std is zero.
CepstralStats FitCepstralStats(const std::vector<Matrix>& cepstra);
void ValidateStats(const CepstralStats& stats);

/// Static cepstra z-scored with `stats`, followed by first and second
/// regression deltas: [c | d | dd], 39 columns.
Matrix AssembleMfcc(const Matrix& cepstra, const CepstralStats& stats);

/// Regression deltas with edge replication.
Matrix DeltaFeatures(const Matrix& x, std::size_t window = kDeltaWindow);

/// Without `stats`, statistics are fitted on this waveform alone.
FeatureSequence Mfcc39(const Waveform& w,
                       const std::optional<CepstralStats>& stats = std::nullopt);

FeatureSequence MfccFromMel(const MelSpectrogram& mel,
                            const CepstralStats& stats);

/// Differentiable mel -> mfcc39 path (mel: T x 80 linear energies).
Var MfccFromMel(Var mel, const CepstralStats& stats);
/// Same path starting from log-mel values (skips the log).
Var MfccFromLogMel(Var log_mel, const CepstralStats& stats);

/// Normalized autocorrelation pitch tracker on the 640/320 framing.
SourceTrack ExtractSource(const Waveform& w);

}  // namespace artimit::dsp
