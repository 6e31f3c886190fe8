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

#include "artimit/eval/metrics.hpp"

#include <cmath>
#include <sstream>

#include "artimit/artic/gpca.hpp"
#include "artimit/common/error.hpp"

namespace artimit::eval {

CorrelationReport PearsonPerParam(const std::vector<Matrix>& pred,
                                  const std::vector<Matrix>& truth) {
  if (pred.size() != truth.size())
    Fail(ErrorKind::kDimension, "prediction and truth sets differ in size");
  if (pred.empty()) Fail(ErrorKind::kEmptySequence, "no trajectories to correlate");
  const std::size_t dim = pred.front().cols();
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (!pred[i].SameShape(truth[i]) || pred[i].cols() != dim)
      Fail(ErrorKind::kDimension, "trajectory pair " + std::to_string(i) +
                                      " is not frame-aligned (" + std::to_string(pred[i].rows()) +
                                      "x" + std::to_string(pred[i].cols()) + " vs " +
                                      std::to_string(truth[i].rows()) + "x" +
                                      std::to_string(truth[i].cols()) + ")");
  CorrelationReport rep;
  for (std::size_t c = 0; c < dim; ++c)
    rep.names.push_back(dim == artic::kNumParams ? std::string(artic::kParamNames[c])
                                                 : "dim" + std::to_string(c));
  std::vector<double> mp(dim, 0.0), mt(dim, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    rep.frames += pred[i].rows();
    for (std::size_t t = 0; t < pred[i].rows(); ++t)
      for (std::size_t c = 0; c < dim; ++c) {
        mp[c] += pred[i](t, c);
        mt[c] += truth[i](t, c);
      }
  }
  if (rep.frames < 2) Fail(ErrorKind::kEmptySequence, "correlation needs at least 2 frames");
  const auto n = static_cast<double>(rep.frames);
  for (std::size_t c = 0; c < dim; ++c) {
    mp[c] /= n;
    mt[c] /= n;
  }
  std::vector<double> sxy(dim, 0.0), sxx(dim, 0.0), syy(dim, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t t = 0; t < pred[i].rows(); ++t)
      for (std::size_t c = 0; c < dim; ++c) {
        const double x = pred[i](t, c) - mp[c], y = truth[i](t, c) - mt[c];
        sxy[c] += x * y;
        sxx[c] += x * x;
        syy[c] += y * y;
      }
  for (std::size_t c = 0; c < dim; ++c) {
    if (!(sxx[c] > 0.0) || !(syy[c] > 0.0))
      Fail(ErrorKind::kUndefinedCorrelation,
           "parameter " + rep.names[c] + " has zero variance in the " +
               (sxx[c] > 0.0 ? "truth" : "prediction"));
    rep.r.push_back(sxy[c] / std::sqrt(sxx[c] * syy[c]));
    rep.mean += rep.r.back() / static_cast<double>(dim);
  }
  return rep;
}

std::string FormatCorrelation(const CorrelationReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << "param,r\n";
  for (std::size_t c = 0; c < report.r.size(); ++c)
    out << report.names[c] << ',' << report.r[c] << '\n';
  out << "mean," << report.mean << '\n';
  return out.str();
}

std::size_t EditDistance(const std::vector<std::string>& reference,
                         const std::vector<std::string>& hypothesis) {
  std::vector<std::size_t> prev(hypothesis.size() + 1), cur(hypothesis.size() + 1);
  for (std::size_t j = 0; j <= hypothesis.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= reference.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hypothesis.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hypothesis.size()];
}

double Wer(const std::vector<std::string>& reference,
           const std::vector<std::string>& hypothesis) {
  if (reference.empty()) Fail(ErrorKind::kUndefinedWer, "reference transcript is empty");
  return static_cast<double>(EditDistance(reference, hypothesis)) /
         static_cast<double>(reference.size());
}

}  // namespace artimit::eval
