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

#include "artimit/eval/probe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "artimit/common/error.hpp"
#include "artimit/graph/ops.hpp"
#include "artimit/graph/optimizer.hpp"

namespace artimit::eval {

ProbeModel TrainProbe(const Matrix& features, const std::vector<std::string>& labels,
                      const ProbeConfig& cfg) {
  if (features.rows() != labels.size())
    Fail(ErrorKind::kDimension, std::to_string(features.rows()) + " frames but " +
                                    std::to_string(labels.size()) + " labels");
  RequireFinite(features, "probe features");
  ProbeModel model;
  std::map<std::string, int> index;
  for (const std::string& l : labels) index.emplace(l, 0);
  if (index.size() < 2)
    Fail(ErrorKind::kLabelCoverage, "probe needs at least two classes, got " +
                                        std::to_string(index.size()));
  if (cfg.batch_size == 0 || !(cfg.lr > 0.0))
    Fail(ErrorKind::kConfig, "batch size and learning rate must be positive");
  for (auto& [label, k] : index) {
    k = static_cast<int>(model.classes.size());
    model.classes.push_back(label);
  }
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = index.at(labels[i]);

  const std::size_t n = features.rows(), d = features.cols(), k = model.classes.size();
  std::vector<double> mean(d, 0.0), inv_sd(d, 1.0);
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += features(t, c);
    s /= static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) sq += (features(t, c) - s) * (features(t, c) - s);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    mean[c] = s;
    inv_sd[c] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  Matrix z(n, d);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t c = 0; c < d; ++c) z(t, c) = (features(t, c) - mean[c]) * inv_sd[c];

  ParameterSet params;
  params.Add("weight", Matrix(d, k));
  params.Add("bias", Matrix(1, k));
  OptimizerState opt(cfg.lr);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t b = 0; b < n; b += cfg.batch_size) {
      const std::size_t e = std::min(n, b + cfg.batch_size);
      Matrix xb(e - b, d);
      std::vector<int> yb;
      for (std::size_t r = b; r < e; ++r) {
        std::copy(z.row(order[r]).begin(), z.row(order[r]).end(), xb.row(r - b).begin());
        yb.push_back(y[order[r]]);
      }
      Tape tape;
      Var logits = AddRow(MatMul(tape.ConstantRef(xb), tape.Param(params.at("weight"))),
                          tape.Param(params.at("bias")));
      Var loss = SoftmaxCrossEntropy(logits, yb);
      total += loss.value()(0, 0) * static_cast<double>(e - b);
      tape.Backward(loss);
      AddWeightDecay(params, cfg.weight_decay);
      AdamStep(params, opt);
    }
    model.train_loss.push_back(total / static_cast<double>(n));
  }
  // Fold the standardization: (x - mean) * inv_sd * W + b.
  const Matrix& w = params.at("weight").value;
  model.weight = Matrix(d, k);
  model.bias = params.at("bias").value;
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t j = 0; j < k; ++j) {
      model.weight(c, j) = w(c, j) * inv_sd[c];
      model.bias(0, j) -= mean[c] * inv_sd[c] * w(c, j);
    }
  return model;
}

std::vector<std::string> ProbePredict(const ProbeModel& model, const Matrix& features) {
  if (features.cols() != model.weight.rows())
    Fail(ErrorKind::kDimension, "probe expects " + std::to_string(model.weight.rows()) +
                                    "-dim features, got " + std::to_string(features.cols()));
  std::vector<std::string> out;
  out.reserve(features.rows());
  for (std::size_t t = 0; t < features.rows(); ++t) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < model.classes.size(); ++j) {
      double s = model.bias(0, j);
      for (std::size_t c = 0; c < features.cols(); ++c) s += features(t, c) * model.weight(c, j);
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    out.push_back(model.classes[best]);
  }
  return out;
}

double ProbeAccuracy(const ProbeModel& model, const Matrix& features,
                     const std::vector<std::string>& labels) {
  if (features.rows() != labels.size())
    Fail(ErrorKind::kDimension, std::to_string(features.rows()) + " frames but " +
                                    std::to_string(labels.size()) + " labels");
  if (labels.empty()) Fail(ErrorKind::kEmptySequence, "no frames to classify");
  for (const std::string& l : labels)
    if (std::find(model.classes.begin(), model.classes.end(), l) == model.classes.end())
      Fail(ErrorKind::kLabelCoverage, "class '" + l + "' is absent from probe training");
  const std::vector<std::string> pred = ProbePredict(model, features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

store::Checkpoint ProbeToCheckpoint(const ProbeModel& model) {
  store::Checkpoint c;
  c.schema = "probe";
  std::string joined;
  for (const std::string& cl : model.classes) joined += (joined.empty() ? "" : " ") + cl;
  c.attributes["classes"] = joined;
  c.tensors["weight"] = model.weight;
  c.tensors["bias"] = model.bias;
  return c;
}

ProbeModel ProbeFromCheckpoint(const store::Checkpoint& c) {
  store::RequireSchema(c, "probe");
  ProbeModel m;
  std::istringstream in(c.attribute("classes"));
  for (std::string cl; in >> cl;) m.classes.push_back(cl);
  m.weight = c.tensor("weight");
  m.bias = c.tensor("bias");
  if (m.classes.size() < 2 || m.weight.cols() != m.classes.size() ||
      m.bias.rows() != 1 || m.bias.cols() != m.classes.size())
    Fail(ErrorKind::kFormat, "probe checkpoint shapes do not match its class list");
  return m;
}

std::vector<std::string> FrameLabels(const std::vector<store::AlignmentSegment>& segments,
                                     std::size_t num_frames, const std::string& fill,
                                     double frame_rate) {
  std::vector<std::string> out(num_frames, fill);
  for (const store::AlignmentSegment& s : segments) {
    const auto start = static_cast<std::size_t>(std::llround(s.start_s * frame_rate));
    const auto end = std::min(num_frames, static_cast<std::size_t>(std::llround(s.end_s * frame_rate)));
    for (std::size_t t = start; t < end; ++t) out[t] = s.label;
  }
  return out;
}

}  // namespace artimit::eval
