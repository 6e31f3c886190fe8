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

// Binary formats: 16-bit PCM WAV input, FTR1 feature files and CKP1
// checkpoints. All reals are stored as little-endian f32.

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "artimit/dsp/frontend.hpp"
#include "artimit/graph/parameters.hpp"
#include "artimit/store/binary.hpp"

namespace artimit::store {

/// RIFF/WAVE, PCM 16-bit, mono, 16 kHz; samples scaled by 1/32768.
dsp::Waveform DecodeWav(std::span<const std::uint8_t> data,
                        const std::string& source);
dsp::Waveform ReadWav(const std::filesystem::path& path);
/// Samples are clipped to [-1, 32767/32768] and rounded to 16 bits.
Bytes EncodeWav(const dsp::Waveform& w);
void WriteWav(const std::filesystem::path& path, const dsp::Waveform& w);

// FTR1: "FTR1", u32 n_frames, u32 dim, f32 frame_rate_hz, u32 kind, then
// n_frames * dim f32 row-major.
inline constexpr std::size_t kFeatureHeaderBytes = 20;

Bytes EncodeFeatures(const dsp::FeatureSequence& f);
dsp::FeatureSequence DecodeFeatures(std::span<const std::uint8_t> data,
                                    const std::string& source);
void WriteFeatures(const std::filesystem::path& path,
                   const dsp::FeatureSequence& f);
dsp::FeatureSequence ReadFeatures(const std::filesystem::path& path);

// CKP1: "CKP1", u32 metadata length, UTF-8 metadata lines, then the tensor
// data region. Metadata lines:
//   schema <name>
//   attr <key> <value...>
//   tensor <name> <rows> <cols> <byte offset into the data region>
inline const std::set<std::string> kCheckpointSchemas = {
    "inverse_model", "synthesizer_net", "gpca_model", "frozen_encoder",
    "probe"};

struct Checkpoint {
  std::string schema;
  std::map<std::string, std::string> attributes;
  std::map<std::string, Matrix> tensors;

  const Matrix& tensor(const std::string& name) const;
  const std::string& attribute(const std::string& name) const;
  bool has_attribute(const std::string& name) const {
    return attributes.contains(name);
  }
};

Bytes EncodeCheckpoint(const Checkpoint& c);
Checkpoint DecodeCheckpoint(std::span<const std::uint8_t> data,
                            const std::string& source);
void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);
/// Raises kFormat unless the checkpoint carries `schema`.
void RequireSchema(const Checkpoint& c, const std::string& schema);

/// Copies every parameter value into `c.tensors` under `prefix + name`.
void StoreParameters(const ParameterSet& params, const std::string& prefix,
                     Checkpoint& c);
/// Overwrites existing parameter values from `c`; shapes must match.
void LoadParameters(const Checkpoint& c, const std::string& prefix,
                    ParameterSet& params);

/// Rounds every value through f32, mirroring a save/load cycle.
Matrix RoundToF32(const Matrix& m);

}  // namespace artimit::store
