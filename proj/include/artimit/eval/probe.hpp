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

// Frame-level linear probes (multinomial logistic regression).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "artimit/graph/matrix.hpp"
#include "artimit/store/formats.hpp"
#include "artimit/store/text_formats.hpp"

namespace artimit::eval {

struct ProbeConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 256;
  double lr = 1e-2;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
};

/// Linear map plus argmax. Input standardization is folded into the weights.
struct ProbeModel {
  std::vector<std::string> classes;
  Matrix weight;  // D x K
  Matrix bias;    // 1 x K
  std::vector<double> train_loss;
};

/// Raises kLabelCoverage with fewer than two classes.
ProbeModel TrainProbe(const Matrix& features, const std::vector<std::string>& labels,
                      const ProbeConfig& cfg = {});

std::vector<std::string> ProbePredict(const ProbeModel& model, const Matrix& features);

/// Fraction of frames classified correctly. Raises kLabelCoverage when a
/// label was never seen in training.
double ProbeAccuracy(const ProbeModel& model, const Matrix& features,
                     const std::vector<std::string>& labels);

store::Checkpoint ProbeToCheckpoint(const ProbeModel& model);
ProbeModel ProbeFromCheckpoint(const store::Checkpoint& c);

/// Frame labels from segments: frame t takes the label of the segment whose
/// rounded frame span contains it, or `fill` when none does.
std::vector<std::string> FrameLabels(const std::vector<store::AlignmentSegment>& segments,
                                     std::size_t num_frames, const std::string& fill = "",
                                     double frame_rate = 50.0);

}  // namespace artimit::eval
