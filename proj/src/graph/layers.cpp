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

#include "artimit/graph/layers.hpp"

#include <cmath>

#include "artimit/common/error.hpp"

namespace artimit {

void AddDenseParams(ParameterSet& params, const std::string& prefix,
                    std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  params.Add(prefix + ".weight", UniformMatrix(in, out, bound, rng));
  params.Add(prefix + ".bias", UniformMatrix(1, out, bound, rng));
}

Var DenseForward(Tape& tape, Var x, ParameterSet& params,
                 const std::string& prefix, Activation activation) {
  RequireFinite(x.value(), "dense input");
  Parameter& w = params.at(prefix + ".weight");
  Parameter& b = params.at(prefix + ".bias");
  if (w.value.rows() != x.value().cols()) {
    Fail(ErrorKind::kDimension, prefix + ": input width " +
                                    std::to_string(x.value().cols()) +
                                    " vs weight " + w.value.ShapeString());
  }
  RequireShape(b.value, 1, w.value.cols(), prefix + ".bias");
  return Activate(AddRow(MatMul(x, tape.Param(w)), tape.Param(b)), activation);
}

std::string LstmParamName(const std::string& prefix, std::size_t layer,
                          bool backward, const std::string& leaf) {
  return prefix + ".l" + std::to_string(layer) + (backward ? ".bwd." : ".fwd.") +
         leaf;
}

void AddBiLstmParams(ParameterSet& params, const std::string& prefix,
                     std::size_t input_dim, std::size_t layers,
                     std::size_t hidden, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : 2 * hidden;
    for (bool bwd : {false, true}) {
      params.Add(LstmParamName(prefix, l, bwd, "w_ih"),
                 UniformMatrix(in, 4 * hidden, bound, rng));
      params.Add(LstmParamName(prefix, l, bwd, "w_hh"),
                 UniformMatrix(hidden, 4 * hidden, bound, rng));
      params.Add(LstmParamName(prefix, l, bwd, "b"),
                 UniformMatrix(1, 4 * hidden, bound, rng));
    }
  }
}

Var BiLstmForward(Tape& tape, Var x, ParameterSet& params,
                  const std::string& prefix, std::size_t layers,
                  std::size_t hidden) {
  if (x.value().rows() == 0)
    Fail(ErrorKind::kEmptySequence, "bilstm over an empty sequence");
  Var h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<Var> halves;
    for (bool bwd : {false, true}) {
      Parameter& w_ih = params.at(LstmParamName(prefix, l, bwd, "w_ih"));
      Parameter& w_hh = params.at(LstmParamName(prefix, l, bwd, "w_hh"));
      Parameter& b = params.at(LstmParamName(prefix, l, bwd, "b"));
      if (w_hh.value.rows() != hidden)
        Fail(ErrorKind::kDimension, "bilstm: hidden size mismatch");
      halves.push_back(LstmDirection(h, tape.Param(w_ih), tape.Param(w_hh),
                                     tape.Param(b), bwd));
    }
    h = ConcatCols(halves);
  }
  return h;
}

}  // namespace artimit
