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

#include "artimit/imitation/loss_space.hpp"

#include <random>
#include <sstream>

#include "artimit/common/error.hpp"

namespace artimit::imitation {
namespace {

std::string LayerKey(std::size_t i) { return "layer." + std::to_string(i); }

[[noreturn]] void LayerFail(std::size_t i, const std::string& msg) {
  Fail(ErrorKind::kFormat, "frozen encoder layer " + std::to_string(i) + ": " + msg);
}

}  // namespace

std::string LossSpaceKindName(LossSpaceKind kind) {
  switch (kind) {
    case LossSpaceKind::kLogMel80: return "logmel80";
    case LossSpaceKind::kMfcc39: return "mfcc39";
    case LossSpaceKind::kFrozenEncoder: return "frozen_encoder";
  }
  return "unknown";
}

LossSpaceKind ParseLossSpaceKind(const std::string& name) {
  if (name == "logmel80" || name == "logmel") return LossSpaceKind::kLogMel80;
  if (name == "mfcc39" || name == "mfcc") return LossSpaceKind::kMfcc39;
  if (name == "frozen_encoder" || name == "encoder") return LossSpaceKind::kFrozenEncoder;
  Fail(ErrorKind::kConfig, "unknown loss space '" + name + "'");
}

Activation EncoderActivation(int code) {
  switch (code) {
    case 0: return Activation::kIdentity;
    case 1: return Activation::kTanh;
    case 2: return Activation::kGelu;
  }
  Fail(ErrorKind::kFormat, "unknown encoder activation code " + std::to_string(code));
}

int EncoderActivationCode(Activation a) {
  switch (a) {
    case Activation::kIdentity: return 0;
    case Activation::kTanh: return 1;
    case Activation::kGelu: return 2;
    default: break;
  }
  Fail(ErrorKind::kConfig, "activation " + ActivationName(a) +
                               " is not representable in a frozen encoder");
}

std::size_t FrozenEncoder::input_window() const {
  return layers.empty() ? 1 : layers.front().window;
}

std::size_t FrozenEncoder::output_dim() const {
  return layers.empty() ? dsp::kNumMels : layers.back().out_dim;
}

void ValidateEncoder(const FrozenEncoder& encoder) {
  if (encoder.layers.empty()) Fail(ErrorKind::kFormat, "frozen encoder has no layers");
  std::size_t expected_in = dsp::kNumMels;
  for (std::size_t i = 0; i < encoder.layers.size(); ++i) {
    const EncoderLayer& l = encoder.layers[i];
    if (l.in_dim != expected_in)
      LayerFail(i, "input dim " + std::to_string(l.in_dim) + " does not match " +
                       std::to_string(expected_in));
    if (l.out_dim == 0) LayerFail(i, "output dim is zero");
    if (l.window == 0 || l.window % 2 == 0)
      LayerFail(i, "context window " + std::to_string(l.window) + " is not odd");
    const std::string w = LayerKey(i) + ".weight", b = LayerKey(i) + ".bias";
    if (!encoder.params.contains(w) || !encoder.params.contains(b))
      LayerFail(i, "missing weight or bias tensor");
    const Matrix& wm = encoder.params.at(w).value;
    const Matrix& bm = encoder.params.at(b).value;
    if (wm.rows() != l.window * l.in_dim || wm.cols() != l.out_dim)
      LayerFail(i, "weight is " + std::to_string(wm.rows()) + "x" +
                       std::to_string(wm.cols()) + ", declared " +
                       std::to_string(l.window * l.in_dim) + "x" +
                       std::to_string(l.out_dim));
    if (bm.rows() != 1 || bm.cols() != l.out_dim)
      LayerFail(i, "bias is " + std::to_string(bm.rows()) + "x" +
                       std::to_string(bm.cols()) + ", declared 1x" +
                       std::to_string(l.out_dim));
    expected_in = l.out_dim;
  }
}

store::Checkpoint EncoderToCheckpoint(const FrozenEncoder& encoder) {
  ValidateEncoder(encoder);
  store::Checkpoint c;
  c.schema = "frozen_encoder";
  c.attributes["layers"] = std::to_string(encoder.layers.size());
  for (std::size_t i = 0; i < encoder.layers.size(); ++i) {
    const EncoderLayer& l = encoder.layers[i];
    c.attributes[LayerKey(i)] = std::to_string(l.in_dim) + " " + std::to_string(l.out_dim) +
                                " " + std::to_string(l.window) + " " +
                                std::to_string(EncoderActivationCode(l.activation));
  }
  store::StoreParameters(encoder.params, "", c);
  return c;
}

FrozenEncoder EncoderFromCheckpoint(const store::Checkpoint& c) {
  store::RequireSchema(c, "frozen_encoder");
  FrozenEncoder e;
  std::size_t count = 0;
  try {
    count = std::stoul(c.attribute("layers"));
  } catch (const std::logic_error&) {
    Fail(ErrorKind::kFormat, "frozen encoder layer count is not a number");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!c.has_attribute(LayerKey(i))) LayerFail(i, "missing layer record");
    std::istringstream in(c.attribute(LayerKey(i)));
    EncoderLayer l;
    int code = -1;
    std::string extra;
    if (!(in >> l.in_dim >> l.out_dim >> l.window >> code) || (in >> extra))
      LayerFail(i, "malformed layer record '" + c.attribute(LayerKey(i)) + "'");
    try {
      l.activation = EncoderActivation(code);
    } catch (const Error& err) {
      LayerFail(i, err.what());
    }
    e.layers.push_back(l);
    for (const char* leaf : {".weight", ".bias"}) {
      const std::string name = LayerKey(i) + leaf;
      if (c.tensors.count(name) == 0) LayerFail(i, "missing tensor " + name);
      e.params.Add(name, c.tensor(name), false);
    }
  }
  ValidateEncoder(e);
  return e;
}

FrozenEncoder LoadFrozenEncoder(const std::filesystem::path& path) {
  return EncoderFromCheckpoint(store::ReadCheckpoint(path));
}

void WriteFrozenEncoder(const std::filesystem::path& path, const FrozenEncoder& encoder) {
  store::WriteCheckpoint(path, EncoderToCheckpoint(encoder));
}

FrozenEncoder IdentityEncoder() {
  FrozenEncoder e;
  e.layers.push_back({dsp::kNumMels, dsp::kNumMels, 1, Activation::kIdentity});
  Matrix w(dsp::kNumMels, dsp::kNumMels);
  for (std::size_t i = 0; i < dsp::kNumMels; ++i) w(i, i) = 1.0;
  e.params.Add("layer.0.weight", std::move(w), false);
  e.params.Add("layer.0.bias", Matrix(1, dsp::kNumMels), false);
  return e;
}

FrozenEncoder RandomEncoder(const std::vector<EncoderLayer>& layers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FrozenEncoder e;
  e.layers = layers;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::size_t fan_in = layers[i].window * layers[i].in_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    e.params.Add(LayerKey(i) + ".weight",
                 UniformMatrix(fan_in, layers[i].out_dim, bound, rng), false);
    e.params.Add(LayerKey(i) + ".bias", UniformMatrix(1, layers[i].out_dim, bound, rng),
                 false);
  }
  ValidateEncoder(e);
  return e;
}

LossSpace LossSpace::LogMel() { return LossSpace(); }

LossSpace LossSpace::Mfcc(const dsp::CepstralStats& stats) {
  dsp::ValidateStats(stats);
  LossSpace s;
  s.kind_ = LossSpaceKind::kMfcc39;
  s.stats_ = stats;
  return s;
}

LossSpace LossSpace::Encoder(FrozenEncoder encoder) {
  ValidateEncoder(encoder);
  encoder.params.SetTrainable(false);
  LossSpace s;
  s.kind_ = LossSpaceKind::kFrozenEncoder;
  s.encoder_ = std::move(encoder);
  return s;
}

std::size_t LossSpace::dim() const {
  switch (kind_) {
    case LossSpaceKind::kLogMel80: return dsp::kNumMels;
    case LossSpaceKind::kMfcc39: return dsp::kMfccDim;
    case LossSpaceKind::kFrozenEncoder: return encoder_.output_dim();
  }
  return 0;
}

dsp::FeatureKind LossSpace::feature_kind() const {
  switch (kind_) {
    case LossSpaceKind::kLogMel80: return dsp::FeatureKind::kLogMel80;
    case LossSpaceKind::kMfcc39: return dsp::FeatureKind::kMfcc39;
    case LossSpaceKind::kFrozenEncoder: break;
  }
  return dsp::FeatureKind::kExternal;
}

Var LossSpace::Apply(Tape& tape, Var log_mel) {
  if (log_mel.cols() != dsp::kNumMels)
    Fail(ErrorKind::kDimension, "loss space expects 80 log-mel bands, got " +
                                    std::to_string(log_mel.cols()));
  switch (kind_) {
    case LossSpaceKind::kLogMel80:
      return log_mel;
    case LossSpaceKind::kMfcc39:
      return dsp::MfccFromLogMel(log_mel, stats_);
    case LossSpaceKind::kFrozenEncoder: {
      Var x = log_mel;
      for (std::size_t i = 0; i < encoder_.layers.size(); ++i) {
        const EncoderLayer& l = encoder_.layers[i];
        x = StackContext(x, l.window);
        x = AddRow(MatMul(x, tape.Param(encoder_.params.at(LayerKey(i) + ".weight"))),
                   tape.Param(encoder_.params.at(LayerKey(i) + ".bias")));
        x = Activate(x, l.activation);
      }
      return x;
    }
  }
  return log_mel;
}

Matrix LossSpace::Render(const Matrix& log_mel) {
  Tape tape;
  return Apply(tape, tape.ConstantRef(log_mel)).value();
}

Matrix LossSpace::RenderInput(const dsp::FeatureSequence& features) {
  if (features.kind == dsp::FeatureKind::kLogMel80 && features.dim() == dsp::kNumMels)
    return Render(features.frames);
  if (features.kind == feature_kind() && features.dim() == dim()) return features.frames;
  Fail(ErrorKind::kContract, dsp::FeatureKindName(features.kind) + " input (dim " +
                                 std::to_string(features.dim()) +
                                 ") cannot be compared in the " + name() + " space");
}

std::uint64_t LossSpace::Checksum() const {
  ParameterSet snapshot;
  snapshot.Add("kind", Matrix(1, 1, static_cast<double>(kind_)), false);
  if (kind_ == LossSpaceKind::kMfcc39) {
    snapshot.Add("mfcc.mean", Matrix::FromData(1, stats_.mean.size(), stats_.mean), false);
    snapshot.Add("mfcc.std", Matrix::FromData(1, stats_.stddev.size(), stats_.stddev),
                 false);
    snapshot.Add("dct", dsp::DctBasis(), false);
  }
  snapshot.Add("filterbank", dsp::MelFilterbank(), false);
  std::uint64_t h = snapshot.Checksum();
  if (kind_ == LossSpaceKind::kFrozenEncoder) h ^= encoder_.params.Checksum() * 31;
  return h;
}

void StoreLossSpace(const LossSpace& space, store::Checkpoint& c) {
  c.attributes["space.kind"] = space.name();
  if (space.kind() == LossSpaceKind::kMfcc39) {
    const dsp::CepstralStats& st = space.stats();
    c.tensors["space.mfcc_mean"] = Matrix::FromData(1, st.mean.size(), st.mean);
    c.tensors["space.mfcc_std"] = Matrix::FromData(1, st.stddev.size(), st.stddev);
  } else if (space.kind() == LossSpaceKind::kFrozenEncoder) {
    const store::Checkpoint e = EncoderToCheckpoint(space.encoder());
    for (const auto& [k, v] : e.attributes) c.attributes["space." + k] = v;
    for (const auto& [k, v] : e.tensors) c.tensors["space." + k] = v;
  }
}

LossSpace LoadLossSpace(const store::Checkpoint& c) {
  if (!c.has_attribute("space.kind")) return LossSpace::LogMel();
  switch (ParseLossSpaceKind(c.attribute("space.kind"))) {
    case LossSpaceKind::kLogMel80:
      return LossSpace::LogMel();
    case LossSpaceKind::kMfcc39: {
      const Matrix& mean = c.tensor("space.mfcc_mean");
      const Matrix& sd = c.tensor("space.mfcc_std");
      dsp::CepstralStats st;
      st.mean.assign(mean.values().begin(), mean.values().end());
      st.stddev.assign(sd.values().begin(), sd.values().end());
      return LossSpace::Mfcc(st);
    }
    case LossSpaceKind::kFrozenEncoder: {
      store::Checkpoint e;
      e.schema = "frozen_encoder";
      for (const auto& [k, v] : c.attributes)
        if (k.rfind("space.", 0) == 0 && k != "space.kind") e.attributes[k.substr(6)] = v;
      for (const auto& [k, v] : c.tensors)
        if (k.rfind("space.", 0) == 0) e.tensors[k.substr(6)] = v;
      return LossSpace::Encoder(EncoderFromCheckpoint(e));
    }
  }
  return LossSpace::LogMel();
}

}  // namespace artimit::imitation
