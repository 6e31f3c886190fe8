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

// Feature spaces in which imitated speech is compared with its target. Each
// space maps 80-band log-mel frames to feature frames, differentiably.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "artimit/dsp/frontend.hpp"
#include "artimit/graph/ops.hpp"
#include "artimit/graph/parameters.hpp"
#include "artimit/store/formats.hpp"

namespace artimit::imitation {

enum class LossSpaceKind { kLogMel80, kMfcc39, kFrozenEncoder };

std::string LossSpaceKindName(LossSpaceKind kind);
LossSpaceKind ParseLossSpaceKind(const std::string& name);

/// One framewise layer: act(StackContext(x, window) W + b).
struct EncoderLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t window = 1;
  Activation activation = Activation::kIdentity;
};

/// Activation codes of the frozen-encoder format: 0 identity, 1 tanh, 2 gelu.
Activation EncoderActivation(int code);
int EncoderActivationCode(Activation a);

/// Layer stack over log-mel input. Weights live in `params` as
/// "layer.<i>.weight" ((window * in_dim) x out_dim) and "layer.<i>.bias".
struct FrozenEncoder {
  std::vector<EncoderLayer> layers;
  ParameterSet params;

  std::size_t input_window() const;
  std::size_t output_dim() const;
};

/// Validates the chain (first input 80, each input equal to the previous
/// output, odd windows); errors name the offending layer index.
void ValidateEncoder(const FrozenEncoder& encoder);

store::Checkpoint EncoderToCheckpoint(const FrozenEncoder& encoder);
FrozenEncoder EncoderFromCheckpoint(const store::Checkpoint& c);
FrozenEncoder LoadFrozenEncoder(const std::filesystem::path& path);
void WriteFrozenEncoder(const std::filesystem::path& path,
                        const FrozenEncoder& encoder);

/// Single affine layer with W = I, b = 0, window 1.
FrozenEncoder IdentityEncoder();
/// Random stack for tests and diagnostics.
FrozenEncoder RandomEncoder(const std::vector<EncoderLayer>& layers,
                            std::uint64_t seed);

class LossSpace {
 public:
  static LossSpace LogMel();
  /// Corpus-level cepstral statistics used by the mfcc39 path.
  static LossSpace Mfcc(const dsp::CepstralStats& stats);
  static LossSpace Encoder(FrozenEncoder encoder);

  LossSpaceKind kind() const { return kind_; }
  std::string name() const { return LossSpaceKindName(kind_); }
  std::size_t dim() const;
  /// Feature kind of rendered frames.
  dsp::FeatureKind feature_kind() const;

  /// T x 80 log-mel -> T x dim().
  Var Apply(Tape& tape, Var log_mel);
  Matrix Render(const Matrix& log_mel);

  /// Renders input features in this space: log-mel input is mapped through
  /// the space, input already in the space passes through; any other
  /// combination is a contract error.
  Matrix RenderInput(const dsp::FeatureSequence& features);

  const dsp::CepstralStats& stats() const { return stats_; }
  const FrozenEncoder& encoder() const { return encoder_; }
  std::uint64_t Checksum() const;

 private:
  LossSpaceKind kind_ = LossSpaceKind::kLogMel80;
  dsp::CepstralStats stats_;
  FrozenEncoder encoder_;
};

/// Records the space (kind, cepstral statistics or encoder) in \`c\` under
/// "space." names so a checkpoint is self-contained.
void StoreLossSpace(const LossSpace& space, store::Checkpoint& c);
/// Inverse of StoreLossSpace; logmel80 when the checkpoint records no space.
LossSpace LoadLossSpace(const store::Checkpoint& c);

}  // namespace artimit::imitation
