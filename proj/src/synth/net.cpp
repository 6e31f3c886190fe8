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

#include "artimit/synth/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "artimit/common/error.hpp"
#include "artimit/graph/layers.hpp"
#include "artimit/graph/optimizer.hpp"

namespace artimit::synth {
namespace {

std::string LayerName(std::size_t i) { return "l" + std::to_string(i); }

Matrix Rows(const Matrix& m, const std::vector<std::size_t>& idx, std::size_t begin,
            std::size_t end) {
  Matrix out(end - begin, m.cols());
  for (std::size_t r = begin; r < end; ++r)
    std::copy(m.row(idx[r]).begin(), m.row(idx[r]).end(), out.row(r - begin).begin());
  return out;
}

void CheckData(const SynthTrainData& d, const char* what) {
  if (d.artic.cols() != 6 || d.source.cols() != 2 || d.log_mel.cols() != kNetOutput ||
      d.source.rows() != d.artic.rows() || d.log_mel.rows() != d.artic.rows())
    Fail(ErrorKind::kDimension,
         std::string(what) + " frames must be aligned N x 6, N x 2 and N x 80");
}

}  // namespace

SynthesizerNet InitSynthesizerNet(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SynthesizerNet net;
  std::size_t in = kNetInput;
  for (std::size_t i = 0; i < kNetLayers; ++i) {
    AddDenseParams(net.params, LayerName(i), in, kNetHidden, rng);
    in = kNetHidden;
  }
  AddDenseParams(net.params, "out", kNetHidden, kNetOutput, rng);
  net.params.Add("input.shift", Matrix(1, kNetInput), false);
  net.params.Add("input.scale", Matrix(1, kNetInput, 1.0), false);
  return net;
}

Var SynthNetForward(Tape& tape, SynthesizerNet& net, Var artic,
                    const Matrix& source) {
  RequireShape(source, artic.value().rows(), 2, "synthesizer source");
  Var x = ConcatCols({artic, tape.Constant(source)});
  x = ColumnAffine(x, net.params.at("input.shift").value,
                   net.params.at("input.scale").value);
  for (std::size_t i = 0; i < kNetLayers; ++i)
    x = DenseForward(tape, x, net.params, LayerName(i), Activation::kTanh);
  return DenseForward(tape, x, net.params, "out", Activation::kIdentity);
}

Matrix SynthNetPredict(SynthesizerNet& net, const Matrix& artic,
                       const Matrix& source) {
  Tape tape;
  return SynthNetForward(tape, net, tape.ConstantRef(artic), source).value();
}

double SynthNetMse(SynthesizerNet& net, const SynthTrainData& data) {
  CheckData(data, "evaluation");
  if (data.artic.rows() == 0) return 0.0;
  const Matrix pred = SynthNetPredict(net, data.artic, data.source);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    s += (pred[i] - data.log_mel[i]) * (pred[i] - data.log_mel[i]);
  return s / static_cast<double>(pred.size());
}

SynthesizerNet TrainSynthesizer(const SynthTrainData& train,
                                const SynthTrainData& valid,
                                const SynthTrainConfig& cfg, SynthTrainLog* log) {
  CheckData(train, "training");
  CheckData(valid, "validation");
  if (train.artic.rows() == 0) Fail(ErrorKind::kEmptySequence, "no training frames");
  if (cfg.batch_size == 0 || !(cfg.lr > 0.0))
    Fail(ErrorKind::kConfig, "batch size and learning rate must be positive");
  SynthesizerNet net = InitSynthesizerNet(cfg.seed);

  // Population z-score of the 8 inputs; constant inputs keep unit scale.
  const Matrix inputs = HStack({train.artic, train.source});
  Matrix& shift = net.params.at("input.shift").value;
  Matrix& scale = net.params.at("input.scale").value;
  const auto n = static_cast<double>(inputs.rows());
  for (std::size_t c = 0; c < kNetInput; ++c) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < inputs.rows(); ++t) mean += inputs(t, c);
    mean /= n;
    for (std::size_t t = 0; t < inputs.rows(); ++t)
      sq += (inputs(t, c) - mean) * (inputs(t, c) - mean);
    const double sd = std::sqrt(sq / n);
    shift(0, c) = mean;
    scale(0, c) = sd > 1e-12 ? 1.0 / sd : 1.0;
  }

  OptimizerState opt(cfg.lr);
  std::mt19937_64 rng(cfg.seed ^ 0x5eedULL);
  std::vector<std::size_t> order(train.artic.rows());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), b + cfg.batch_size);
      const Matrix a = Rows(train.artic, order, b, e);
      const Matrix s = Rows(train.source, order, b, e);
      const Matrix y = Rows(train.log_mel, order, b, e);
      Tape tape;
      Var loss = MseLoss(SynthNetForward(tape, net, tape.ConstantRef(a), s),
                         tape.ConstantRef(y));
      if (!std::isfinite(loss.value()(0, 0)))
        Fail(ErrorKind::kDivergence, "synthesizer loss became non-finite at step " +
                                         std::to_string(opt.step + 1));
      tape.Backward(loss);
      AdamStep(net.params, opt);
    }
    if (log) {
      log->train_loss.push_back(SynthNetMse(net, train));
      log->valid_loss.push_back(SynthNetMse(net, valid));
    }
  }
  net.train_loss = SynthNetMse(net, train);
  net.valid_loss = SynthNetMse(net, valid);
  return net;
}

store::Checkpoint SynthNetToCheckpoint(const SynthesizerNet& net) {
  store::Checkpoint c;
  c.schema = "synthesizer_net";
  c.attributes["train_loss"] = std::to_string(net.train_loss);
  c.attributes["valid_loss"] = std::to_string(net.valid_loss);
  store::StoreParameters(net.params, "", c);
  return c;
}

SynthesizerNet SynthNetFromCheckpoint(const store::Checkpoint& c) {
  store::RequireSchema(c, "synthesizer_net");
  SynthesizerNet net = InitSynthesizerNet(0);
  store::LoadParameters(c, "", net.params);
  net.train_loss = std::stod(c.attribute("train_loss"));
  net.valid_loss = std::stod(c.attribute("valid_loss"));
  return net;
}

}  // namespace artimit::synth
