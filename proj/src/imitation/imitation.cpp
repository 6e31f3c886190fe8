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

#include "artimit/imitation/imitation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "artimit/common/error.hpp"
#include "artimit/graph/layers.hpp"
#include "artimit/graph/optimizer.hpp"
#include "artimit/store/formats.hpp"

namespace artimit::imitation {
namespace {

constexpr const char* kLstmPrefix = "lstm";
constexpr const char* kHeadPrefix = "head";

std::uint64_t FrozenChecksum(Synthesizer& synth, LossSpace& space) {
  return synth.Checksum() * 1099511628211ULL ^ space.Checksum();
}

void CheckItems(const std::vector<ImitationItem>& items, std::size_t input_dim,
                std::size_t target_dim, const char* what) {
  for (const ImitationItem& it : items) {
    const std::size_t t = it.input.rows();
    if (t == 0) Fail(ErrorKind::kEmptySequence, std::string(what) + " item " + it.id + " has no frames");
    if (it.input.cols() != input_dim || it.target.cols() != target_dim ||
        it.target.rows() != t || it.source.rows() != t || it.source.cols() != 2)
      Fail(ErrorKind::kDimension, std::string(what) + " item " + it.id +
                                      " has misaligned input, target or source frames");
  }
}

}  // namespace

Synthesizer Synthesizer::Analytic(const synth::TractConfig& cfg) {
  synth::ValidateTractConfig(cfg);
  Synthesizer s;
  s.tract_ = cfg;
  return s;
}

Synthesizer Synthesizer::Net(synth::SynthesizerNet net) {
  net.params.SetTrainable(false);
  Synthesizer s;
  s.net_ = std::move(net);
  return s;
}

Var Synthesizer::Forward(Tape& tape, Var artic, const Matrix& source) {
  if (net_) return synth::SynthNetForward(tape, *net_, artic, source);
  return synth::TractForward(artic, source, tract_);
}

Matrix Synthesizer::Forward(const Matrix& artic, const Matrix& source) {
  if (net_) return synth::SynthNetPredict(*net_, artic, source);
  return synth::TractForward(artic, source, tract_);
}

std::uint64_t Synthesizer::Checksum() const {
  if (net_) return net_->params.Checksum();
  const synth::TractConfig& c = tract_;
  std::vector<double> v;
  for (const auto* arr : {&c.formant_base, &c.formant_gain, &c.peak_gain})
    v.insert(v.end(), arr->begin(), arr->end());
  v.insert(v.end(), {c.width_bins, c.width_tb_gain, c.amplitude_slope, c.ripple_depth,
                     c.ripple_period, c.min_formant_hz, c.max_formant_hz, c.log_floor,
                     c.speaker_scale});
  ParameterSet snapshot;
  snapshot.Add("tract", Matrix::FromData(1, v.size(), v), false);
  return snapshot.Checksum();
}

InverseModel InitInverseModel(std::size_t input_dim, std::uint64_t seed) {
  if (input_dim == 0) Fail(ErrorKind::kDimension, "inverse model input dim must be positive");
  std::mt19937_64 rng(seed);
  InverseModel m;
  m.input_dim = input_dim;
  AddBiLstmParams(m.params, kLstmPrefix, input_dim, kLstmLayers, kLstmHidden, rng);
  m.params.Add("head.weight", Matrix(2 * kLstmHidden, kArticDim));
  m.params.Add("head.bias", Matrix(1, kArticDim));
  m.params.Add("input.shift", Matrix(1, input_dim), false);
  m.params.Add("input.scale", Matrix(1, input_dim, 1.0), false);
  return m;
}

Var InverseForward(Tape& tape, InverseModel& model, Var z) {
  if (z.cols() != model.input_dim)
    Fail(ErrorKind::kSchema, "inverse model expects " + std::to_string(model.input_dim) +
                                 "-dim input, got " + std::to_string(z.cols()));
  if (z.rows() == 0) Fail(ErrorKind::kEmptySequence, "inverse model input has no frames");
  Var x = ColumnAffine(z, model.params.at("input.shift").value,
                       model.params.at("input.scale").value);
  x = BiLstmForward(tape, x, model.params, kLstmPrefix, kLstmLayers, kLstmHidden);
  return DenseForward(tape, x, model.params, kHeadPrefix, Activation::kIdentity);
}

Matrix InverseForward(InverseModel& model, const Matrix& z) {
  Tape tape;
  return InverseForward(tape, model, tape.ConstantRef(z)).value();
}

artic::ArticulatoryTrajectory InverseForward(InverseModel& model,
                                             const dsp::FeatureSequence& z) {
  if (std::abs(z.frame_rate - dsp::kFrameRate) > 1e-9)
    Fail(ErrorKind::kSchema, "inverse model input must be at 50 Hz");
  return {InverseForward(model, z.frames), dsp::kFrameRate};
}

store::Checkpoint InverseToCheckpoint(const InverseModel& model) {
  store::Checkpoint c;
  c.schema = "inverse_model";
  c.attributes["input_dim"] = std::to_string(model.input_dim);
  c.attributes["input_kind"] = dsp::FeatureKindName(model.input_kind);
  c.attributes["lstm_layers"] = std::to_string(kLstmLayers);
  c.attributes["lstm_hidden"] = std::to_string(kLstmHidden);
  store::StoreParameters(model.params, "", c);
  return c;
}

InverseModel InverseFromCheckpoint(const store::Checkpoint& c) {
  store::RequireSchema(c, "inverse_model");
  if (c.attribute("lstm_layers") != std::to_string(kLstmLayers) ||
      c.attribute("lstm_hidden") != std::to_string(kLstmHidden))
    Fail(ErrorKind::kSchema, "inverse model architecture must be 2 x 64 BiLSTM");
  std::size_t dim = 0;
  try {
    dim = std::stoul(c.attribute("input_dim"));
  } catch (const std::logic_error&) {
    Fail(ErrorKind::kFormat, "inverse model input_dim is not a number");
  }
  InverseModel m = InitInverseModel(dim, 0);
  m.input_kind = dsp::ParseFeatureKind(c.attribute("input_kind"));
  store::LoadParameters(c, "", m.params);
  return m;
}

Var ImitationLoss(Tape& tape, Var target, Var a_hat, const Matrix& source,
                  Synthesizer& synth, LossSpace& space) {
  if (target.cols() != space.dim())
    Fail(ErrorKind::kContract, "target has dim " + std::to_string(target.cols()) +
                                   " but the " + space.name() + " space has dim " +
                                   std::to_string(space.dim()));
  if (target.rows() != a_hat.rows() || source.rows() != a_hat.rows())
    Fail(ErrorKind::kContract, "target, estimate and source frame counts differ");
  Var mel = synth.Forward(tape, a_hat, source);
  return CosineDistanceLoss(target, space.Apply(tape, mel));
}

double ImitationLoss(const Matrix& target, const Matrix& a_hat, const Matrix& source,
                     Synthesizer& synth, LossSpace& space) {
  Tape tape;
  return ImitationLoss(tape, tape.ConstantRef(target), tape.ConstantRef(a_hat), source,
                       synth, space)
      .value()(0, 0);
}

std::vector<ImitationItem> LoadImitationItems(const store::Manifest& manifest,
                                              const std::string& split,
                                              LossSpace& space) {
  std::vector<ImitationItem> items;
  for (const store::ManifestEntry* e : manifest.Split(split)) {
    ImitationItem it;
    it.id = e->id;
    it.speaker = e->speaker;
    const dsp::FeatureSequence f = store::ReadFeatures(e->path("features"));
    it.target = space.RenderInput(f);
    it.input = it.target;
    it.source = store::ReadFeatures(e->path("source")).frames;
    if (it.source.rows() != it.target.rows() || it.source.cols() != 2)
      Fail(ErrorKind::kDimension, "item " + it.id + ": source track has " +
                                      std::to_string(it.source.rows()) + " frames, features " +
                                      std::to_string(it.target.rows()));
    if (e->has("trajectory")) {
      it.truth = store::ReadFeatures(e->path("trajectory")).frames;
      if (it.truth->rows() != it.target.rows() || it.truth->cols() != kArticDim)
        Fail(ErrorKind::kDimension, "item " + it.id + ": trajectory is not T x 6");
    }
    if (e->has("alignment")) it.alignment = store::ReadAlignments(e->path("alignment"));
    items.push_back(std::move(it));
  }
  return items;
}

dsp::CepstralStats FitCorpusCepstralStats(const store::Manifest& manifest,
                                          const std::string& split) {
  std::vector<Matrix> cepstra;
  for (const store::ManifestEntry* e : manifest.Split(split)) {
    const dsp::FeatureSequence f = store::ReadFeatures(e->path("features"));
    if (f.kind != dsp::FeatureKind::kLogMel80)
      Fail(ErrorKind::kContract, "item " + e->id + ": cepstral statistics need log-mel features");
    cepstra.push_back(dsp::CepstraFromLogMel(f.frames));
  }
  if (cepstra.empty()) Fail(ErrorKind::kEmptySequence, "no items in split '" + split + "'");
  return dsp::FitCepstralStats(cepstra);
}

double EvaluateLoss(InverseModel& model, const std::vector<ImitationItem>& items,
                    Synthesizer& synth, LossSpace& space) {
  double total = 0.0;
  std::size_t frames = 0;
  for (const ImitationItem& it : items) {
    const Matrix a_hat = InverseForward(model, it.input);
    total += ImitationLoss(it.target, a_hat, it.source, synth, space) *
             static_cast<double>(it.input.rows());
    frames += it.input.rows();
  }
  return frames ? total / static_cast<double>(frames) : 0.0;
}

ImitationRun TrainInverse(const std::vector<ImitationItem>& train,
                          const std::vector<ImitationItem>& valid, Synthesizer& synth,
                          LossSpace& space, const ImitationConfig& cfg) {
  if (train.empty()) Fail(ErrorKind::kEmptySequence, "no training items");
  if (cfg.batch_size == 0 || !(cfg.lr > 0.0))
    Fail(ErrorKind::kConfig, "batch size and learning rate must be positive");
  const std::size_t dim = train.front().input.cols();
  CheckItems(train, dim, space.dim(), "training");
  CheckItems(valid, dim, space.dim(), "validation");

  ImitationRun run;
  run.config = cfg;
  run.loss_space = space.name();
  run.synthesizer = synth.name();
  run.model = InitInverseModel(dim, cfg.seed);
  run.model.input_kind = space.feature_kind();
  run.frozen_checksum = FrozenChecksum(synth, space);

  // Population z-score of the inverse-model input over training frames.
  {
    std::vector<double> mean(dim, 0.0), sq(dim, 0.0);
    double n = 0.0;
    for (const ImitationItem& it : train)
      for (std::size_t t = 0; t < it.input.rows(); ++t, n += 1.0)
        for (std::size_t c = 0; c < dim; ++c) mean[c] += it.input(t, c);
    for (double& m : mean) m /= n;
    for (const ImitationItem& it : train)
      for (std::size_t t = 0; t < it.input.rows(); ++t)
        for (std::size_t c = 0; c < dim; ++c)
          sq[c] += (it.input(t, c) - mean[c]) * (it.input(t, c) - mean[c]);
    Matrix& shift = run.model.params.at("input.shift").value;
    Matrix& scale = run.model.params.at("input.scale").value;
    for (std::size_t c = 0; c < dim; ++c) {
      const double sd = std::sqrt(sq[c] / n);
      shift(0, c) = mean[c];
      scale(0, c) = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
  }

  bool have_truth = !valid.empty();
  for (const ImitationItem& it : valid) have_truth = have_truth && it.truth.has_value();
  if (have_truth) {
    double total = 0.0, frames = 0.0;
    for (const ImitationItem& it : valid) {
      total += ImitationLoss(it.target, *it.truth, it.source, synth, space) *
               static_cast<double>(it.input.rows());
      frames += static_cast<double>(it.input.rows());
    }
    run.fixed_point_loss = total / frames;
  }

  // Length-sorted batches of whole utterances; batch order reshuffled per epoch.
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return train[a].input.rows() < train[b].input.rows();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t b = 0; b < order.size(); b += cfg.batch_size)
    batches.emplace_back(order.begin() + b,
                         order.begin() + std::min(order.size(), b + cfg.batch_size));

  OptimizerState opt(cfg.lr);
  std::mt19937_64 rng(cfg.seed ^ 0x1417ULL);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(batches.begin(), batches.end(), rng);
    double epoch_loss = 0.0, epoch_frames = 0.0;
    for (const std::vector<std::size_t>& batch : batches) {
      double frames = 0.0;
      for (std::size_t i : batch) frames += static_cast<double>(train[i].input.rows());
      Tape tape;
      std::optional<Var> loss;
      for (std::size_t i : batch) {
        const ImitationItem& it = train[i];
        Var a_hat = InverseForward(tape, run.model, tape.ConstantRef(it.input));
        Var l = Scale(ImitationLoss(tape, tape.ConstantRef(it.target), a_hat, it.source,
                                    synth, space),
                      static_cast<double>(it.input.rows()) / frames);
        loss = loss ? Add(*loss, l) : l;
      }
      const double value = loss->value()(0, 0);
      if (!std::isfinite(value))
        Fail(ErrorKind::kDivergence, "imitation loss became non-finite at step " +
                                         std::to_string(opt.step + 1));
      tape.Backward(*loss);
      AdamStep(run.model.params, opt);
      epoch_loss += value * frames;
      epoch_frames += frames;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / epoch_frames;
    rec.val_loss = valid.empty() ? rec.train_loss : EvaluateLoss(run.model, valid, synth, space);
    run.log.push_back(rec);
    if (cfg.on_epoch) cfg.on_epoch(epoch);
    if (FrozenChecksum(synth, space) != run.frozen_checksum)
      Fail(ErrorKind::kContract, "frozen synthesizer or loss-space parameters changed during epoch " +
                                     std::to_string(epoch));
  }
  const double final_loss = run.log.empty() ? EvaluateLoss(run.model, valid.empty() ? train : valid, synth, space)
                                            : run.log.back().val_loss;
  run.converged = final_loss <= run.fixed_point_loss + cfg.convergence_tolerance;
  return run;
}

std::string FormatEpochLog(const std::vector<EpochRecord>& log) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,val_loss\n";
  for (const EpochRecord& r : log) out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
  return out.str();
}

}  // namespace artimit::imitation
