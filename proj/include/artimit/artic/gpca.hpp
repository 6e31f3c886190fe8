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

// EMA resampling and guided PCA between raw coil coordinates and the six
// articulatory parameters.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "artimit/artic/ema.hpp"
#include "artimit/graph/matrix.hpp"
#include "artimit/store/formats.hpp"

namespace artimit::artic {

inline constexpr std::size_t kNumParams = 6;
inline const std::array<std::string, kNumParams> kParamNames = {
    "JH", "TB", "TD", "TT", "LP", "LH"};
/// Column of a canonical parameter name; raises kSchema otherwise.
std::size_t ParamIndex(const std::string& name);

/// T x 6 standardized parameter scores at 50 Hz, columns in kParamNames order.
struct ArticulatoryTrajectory {
  Matrix frames;
  double frame_rate = 50.0;
};

inline constexpr double kTargetRate = 50.0;
inline constexpr std::size_t kResampleTaps = 65;
inline constexpr double kResampleCutoffHz = 22.0;

/// Hamming-windowed sinc low-pass, unity DC gain, designed for `rate`.
std::vector<double> LowPassTaps(double rate);

/// Zero-phase low-pass (edges replicated) then integer decimation to 50 Hz.
/// Raises kUnsupportedRate unless the rate is a positive multiple of 50.
EmaRecording ResampleTo50Hz(const EmaRecording& e);

enum class ExtractionRule { kFirstPc, kCoordinate, kDifference };
std::string ExtractionRuleName(ExtractionRule rule);

struct GpcaStage {
  std::string parameter;
  ExtractionRule rule = ExtractionRule::kFirstPc;
  /// The first channel is the primary coordinate used for sign fixing.
  std::vector<std::string> channels;
};

struct GuidedPcaSpec {
  std::vector<GpcaStage> stages;
};

/// JH <- lower_incisor_y; TB <- PC of tongue_mid; TD <- PC of tongue_back;
/// TT <- PC of tongue_tip; LP <- PC of lip x; LH <- upper_lip_y - lower_lip_y.
GuidedPcaSpec DefaultGpcaSpec();
/// Channel names referenced by the default spec.
std::vector<std::string> DefaultEmaChannels();

/// One stage per line: "<param> <first_pc|coordinate|difference> <channels...>".
GuidedPcaSpec ParseGpcaSpec(const std::string& text, const std::string& source);
std::string FormatGpcaSpec(const GuidedPcaSpec& spec);
void ValidateGpcaSpec(const GuidedPcaSpec& spec, bool allow_partial = false);

struct GuidedPcaModel {
  std::vector<std::string> channels;
  std::vector<double> channel_means;
  /// Stage order.
  std::vector<std::string> parameters;
  /// Stage x channel: extraction vectors applied to residual channels.
  Matrix extraction;
  /// Stage x channel: contribution of each raw stage score to each channel.
  Matrix regression;
  /// Scores are centered by construction; parameters are score / score_std.
  std::vector<double> score_std;

  std::size_t num_stages() const { return parameters.size(); }
};

/// \`allow_partial\` admits specs with fewer than six stages (diagnostics);
/// parameters without a stage encode as zero.
GuidedPcaModel GpcaFit(const EmaRecording& data, const GuidedPcaSpec& spec,
                       bool allow_partial = false);

/// Raw (unstandardized) stage scores, N x stages, plus the final residual.
Matrix GpcaStageScores(const EmaRecording& e, const GuidedPcaModel& model,
                       Matrix* residual = nullptr);
ArticulatoryTrajectory GpcaEncode(const EmaRecording& e,
                                  const GuidedPcaModel& model);
EmaRecording GpcaDecode(const ArticulatoryTrajectory& a,
                        const GuidedPcaModel& model);
/// Reconstruction keeping only the first `stages` stages of the cascade.
EmaRecording GpcaReconstruct(const EmaRecording& e, const GuidedPcaModel& model,
                             std::size_t stages);

/// Per-channel 1 - SSE/SST.
std::vector<double> ChannelR2(const Matrix& truth, const Matrix& estimate);
/// Mean squared error over all entries.
double ChannelMse(const Matrix& truth, const Matrix& estimate);

/// Channels (DefaultEmaChannels order) mixing six smooth independent latents
/// with a seeded coil geometry, plus white noise of std \`noise\`.
EmaRecording SyntheticEma(std::size_t samples, double rate, std::uint64_t seed,
                          double noise);

store::Checkpoint GpcaToCheckpoint(const GuidedPcaModel& model);
GuidedPcaModel GpcaFromCheckpoint(const store::Checkpoint& c);

}  // namespace artimit::artic
