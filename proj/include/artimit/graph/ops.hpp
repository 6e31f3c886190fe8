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

#include <string>
#include <vector>

#include "artimit/graph/tape.hpp"

namespace artimit {

enum class Activation { kIdentity, kTanh, kRelu, kSigmoid, kGelu };

Activation ParseActivation(const std::string& name);
std::string ActivationName(Activation a);

// Elementwise and linear-algebra primitives. All inputs must live on the
// same tape; shape errors raise kDimension.
Var MatMul(Var a, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
/// x + b with b a 1xD row broadcast over the rows of x.
Var AddRow(Var x, Var b);
/// (x - shift) * scale, with shift and scale constant 1xD rows.
Var ColumnAffine(Var x, const Matrix& shift, const Matrix& scale);
Var Activate(Var x, Activation a);
Var Exp(Var x);
/// log(x + floor); x + floor must stay positive.
Var LogFloor(Var x, double floor);
Var Sum(Var x);
Var Mean(Var x);
Var ConcatCols(const std::vector<Var>& parts);
Var SliceCols(Var x, std::size_t begin, std::size_t end);
/// Regression deltas along time (rows) with edge replication:
/// d_t = sum_n n (x_{t+n} - x_{t-n}) / (2 sum_n n^2).
Var DeltaTime(Var x, std::size_t window);
/// Row t of the output concatenates rows t-(w-1)/2 .. t+(w-1)/2 of x, with
/// out-of-range rows replaced by the nearest edge row. `w` must be odd.
Var StackContext(Var x, std::size_t window);

/// Mean over frames of 1 - <z_t, y_t> / (|z_t| |y_t| + eps).
Var CosineDistanceLoss(Var z, Var y, double eps = 1e-8);
/// Mean squared error over all entries.
Var MseLoss(Var prediction, Var target);
/// Mean over rows of -log softmax(logits)_label.
Var SoftmaxCrossEntropy(Var logits, const std::vector<int>& labels);

/// One LSTM direction over the rows of x. Gate blocks of the 4H columns of
/// w_ih (Din x 4H), w_hh (H x 4H) and b (1 x 4H) are ordered input, forget,
/// cell, output. Zero initial state. With `reverse` the recursion runs from
/// the last row to the first; output row t is always the state at frame t.
Var LstmDirection(Var x, Var w_ih, Var w_hh, Var b, bool reverse);

/// Plain-matrix forms shared by differentiable and direct code paths.
Matrix DeltaMatrix(const Matrix& x, std::size_t window);
Matrix StackContextMatrix(const Matrix& x, std::size_t window);
double ActivationValue(Activation a, double x);

}  // namespace artimit
