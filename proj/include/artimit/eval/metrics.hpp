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

// Trajectory correlation and word error rate.

#pragma once

#include <string>
#include <vector>

#include "artimit/graph/matrix.hpp"

namespace artimit::eval {

struct CorrelationReport {
  std::vector<std::string> names;
  std::vector<double> r;
  double mean = 0.0;
  std::size_t frames = 0;
};

/// Per-column Pearson r over frames pooled across all pairs, and the mean
/// over columns. Columns are named after the articulatory parameters when
/// there are six. Raises kUndefinedCorrelation naming the column when either
/// side has zero variance.
CorrelationReport PearsonPerParam(const std::vector<Matrix>& pred,
                                  const std::vector<Matrix>& truth);

/// CSV "param,r" rows followed by "mean,<r>".
std::string FormatCorrelation(const CorrelationReport& report);

/// Unit-cost Levenshtein distance between token sequences.
std::size_t EditDistance(const std::vector<std::string>& reference,
                         const std::vector<std::string>& hypothesis);

/// EditDistance / |reference|; kUndefinedWer for an empty reference.
double Wer(const std::vector<std::string>& reference,
           const std::vector<std::string>& hypothesis);

}  // namespace artimit::eval
