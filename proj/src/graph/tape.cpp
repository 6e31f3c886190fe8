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

#include "artimit/graph/tape.hpp"

#include "artimit/common/error.hpp"

namespace artimit {

const Matrix& Var::value() const { return tape->value(*this); }
bool Var::requires_grad() const { return tape->requires_grad(*this); }

Var Tape::Constant(Matrix value) {
  Node& n = nodes_.emplace_back();
  n.owned = std::move(value);
  return Var{this, nodes_.size() - 1};
}

Var Tape::ConstantRef(const Matrix& value) {
  Node& n = nodes_.emplace_back();
  n.external = &value;
  return Var{this, nodes_.size() - 1};
}

Var Tape::Param(Parameter& parameter) {
  Node& n = nodes_.emplace_back();
  n.external = &parameter.value;
  if (parameter.trainable) {
    n.parameter = &parameter;
    n.requires_grad = true;
  }
  return Var{this, nodes_.size() - 1};
}

Var Tape::Record(Matrix value, const std::vector<Var>& inputs,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& v : inputs) {
    if (v.tape != this) Fail(ErrorKind::kContract, "input from another tape");
    needs = needs || nodes_[v.id].requires_grad;
  }
  Node& n = nodes_.emplace_back();
  n.owned = std::move(value);
  n.requires_grad = needs;
  if (needs) n.backward = std::move(backward);
  return Var{this, nodes_.size() - 1};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.external != nullptr ? *n.external : n.owned;
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  Matrix& g = n.parameter != nullptr ? n.parameter->grad : n.grad;
  const Matrix& val = value(v);
  if (!g.SameShape(val)) g = Matrix(val.rows(), val.cols());
  if (n.parameter != nullptr) n.parameter->grad_ready = true;
  return g;
}

void Tape::AccumulateGrad(Var v, const Matrix& g) {
  if (!nodes_[v.id].requires_grad) return;
  grad(v) += g;
}

void Tape::Backward(Var loss) {
  if (loss.tape != this) Fail(ErrorKind::kContract, "loss from another tape");
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1)
    Fail(ErrorKind::kDimension, "backward requires a 1x1 loss, got " +
                                    lv.ShapeString());
  // Every trainable leaf gets a (possibly zero) gradient slot.
  for (std::size_t i = 0; i <= loss.id; ++i) {
    if (nodes_[i].parameter != nullptr) grad(Var{this, i});
  }
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss)[0] += 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, n.grad);
  }
}

}  // namespace artimit
