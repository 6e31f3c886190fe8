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

// Inverse model (features -> articulatory parameters) and the imitation
// loop: synthesize from the estimate, re-render in a loss space and
// minimize the cosine distance to the input. Only the inverse model learns.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "artimit/artic/gpca.hpp"
#include "artimit/dsp/frontend.hpp"
#include "artimit/graph/parameters.hpp"
#include "artimit/imitation/loss_space.hpp"
#include "artimit/store/text_formats.hpp"
#include "artimit/synth/net.hpp"
#include "artimit/synth/tract.hpp"

namespace artimit::imitation {

inline constexpr std::size_t kLstmLayers = 2;
inline constexpr std::size_t kLstmHidden = 64;
inline constexpr std::size_t kArticDim = 6;

/// Frozen forward model from (articulatory, source) frames to log-mel.
class Synthesizer {
 public:
  static Synthesizer Analytic(const synth::TractConfig& cfg = {});
  static Synthesizer Net(synth::SynthesizerNet net);

  bool is_net() const { return net_.has_value(); }
  std::string name() const { return is_net() ? "net" : "analytic"; }

  Var Forward(Tape& tape, Var artic, const Matrix& source);
  Matrix Forward(const Matrix& artic, const Matrix& source);
  std::uint64_t Checksum() const;

  /// Mutable access for test hooks and the CLI.
  synth::TractConfig& tract() { return tract_; }
  synth::SynthesizerNet& net() { return *net_; }

 private:
  synth::TractConfig tract_;
  std::optional<synth::SynthesizerNet> net_;
};

/// Two-layer BiLSTM over z-scored input frames and a linear head to six
/// parameters. "input.shift"/"input.scale" are frozen normalization rows.
struct InverseModel {
  std::size_t input_dim = 0;
  dsp::FeatureKind input_kind = dsp::FeatureKind::kExternal;
  ParameterSet params;
};

/// The head starts at zero, so an untrained model outputs zeros.
InverseModel InitInverseModel(std::size_t input_dim, std::uint64_t seed);

Var InverseForward(Tape& tape, InverseModel& model, Var z);
Matrix InverseForward(InverseModel& model, const Matrix& z);
/// Requires 50 Hz frames of the trained input dimension (kSchema otherwise).
artic::ArticulatoryTrajectory InverseForward(InverseModel& model,
                                             const dsp::FeatureSequence& z);

store::Checkpoint InverseToCheckpoint(const InverseModel& model);
InverseModel InverseFromCheckpoint(const store::Checkpoint& c);

/// Cosine distance between `target` (input rendered in `space`) and the
/// space rendering of synth(a_hat, source).
Var ImitationLoss(Tape& tape, Var target, Var a_hat, const Matrix& source,
                  Synthesizer& synth, LossSpace& space);
double ImitationLoss(const Matrix& target, const Matrix& a_hat, const Matrix& source,
                     Synthesizer& synth, LossSpace& space);

/// One training or evaluation utterance.
struct ImitationItem {
  std::string id;
  std::string speaker;
  Matrix input;   // T x D, inverse-model input
  Matrix target;  // T x space.dim(), loss target
  Matrix source;  // T x 2, copied from the input, never predicted
  /// Reporting only; never reaches the loss.
  std::optional<Matrix> truth;
  std::vector<store::AlignmentSegment> alignment;
};

/// Reads manifest entries carrying `features` and `source` (optionally
/// `trajectory` and `alignment`). Targets are the features rendered in
/// `space`; the inverse model sees the same representation.
std::vector<ImitationItem> LoadImitationItems(const store::Manifest& manifest,
                                              const std::string& split,
                                              LossSpace& space);

/// Corpus-global cepstral statistics over log-mel `features` of a split.
dsp::CepstralStats FitCorpusCepstralStats(const store::Manifest& manifest,
                                          const std::string& split);

struct ImitationConfig {
  double lr = 1.7e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  /// Largest gap between final validation loss and the fixed-point loss
  /// still reported as converged.
  double convergence_tolerance = 0.01;
  /// Called after every epoch; lets tests tamper with frozen state.
  std::function<void(std::size_t epoch)> on_epoch;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct ImitationRun {
  ImitationConfig config;
  std::string loss_space;
  std::string synthesizer;
  InverseModel model;
  std::vector<EpochRecord> log;
  /// Validation loss at ground truth when every item has one, else 0.
  double fixed_point_loss = 0.0;
  bool converged = false;
  std::uint64_t frozen_checksum = 0;
};

/// Mini-batch Adam on the imitation loss over full utterances in
/// length-sorted batches. Deterministic per seed. Raises kDivergence with
/// the step on a non-finite loss and kContract if any frozen component
/// changes.
ImitationRun TrainInverse(const std::vector<ImitationItem>& train,
                          const std::vector<ImitationItem>& valid,
                          Synthesizer& synth, LossSpace& space,
                          const ImitationConfig& cfg);

/// Mean frame-weighted imitation loss of `model` over `items`.
double EvaluateLoss(InverseModel& model, const std::vector<ImitationItem>& items,
                    Synthesizer& synth, LossSpace& space);

/// CSV with header epoch,train_loss,val_loss.
std::string FormatEpochLog(const std::vector<EpochRecord>& log);

}  // namespace artimit::imitation
