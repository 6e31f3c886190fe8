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

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

#include "artimit/graph/matrix.hpp"
#include "artimit/graph/parameters.hpp"

namespace artimit {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
};

/// Gradient hook of one node: receives the gradient flowing into the node's
/// output and accumulates into its inputs through Tape::AccumulateGrad.
using BackwardFn = std::function<void(Tape&, const Matrix& out_grad)>;

/// Linear record of a forward computation. Nodes are appended in evaluation
/// order, so walking the record backwards visits every node after all of its
/// consumers.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Matrix value);
  /// Non-owning constant; `value` must outlive the tape.
  Var ConstantRef(const Matrix& value);
  /// Leaf bound to a parameter. Reads the value in place; if the parameter is
  /// trainable, Backward accumulates into its gradient slot.
  Var Param(Parameter& parameter);

  /// Records an operation output. `backward` is dropped when no input needs a
  /// gradient.
  Var Record(Matrix value, const std::vector<Var>& inputs, BackwardFn backward);

  /// Reverse sweep from a 1x1 node.
  void Backward(Var loss);

  const Matrix& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  /// Gradient slot of `v` (allocated on first use).
  Matrix& grad(Var v);
  void AccumulateGrad(Var v, const Matrix& g);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* external = nullptr;
    Matrix grad;
    Parameter* parameter = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
};

}  // namespace artimit
