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

#include <cmath>
#include <limits>
#include <random>

#include "artimit/common/error.hpp"
#include "artimit/graph/grad_check.hpp"
#include "artimit/graph/layers.hpp"
#include "artimit/graph/optimizer.hpp"
#include "doctest.h"
#include "unit/test_util.hpp"

namespace artimit {
namespace {

using testing::RandomMatrix;

ParameterSet DenseParams(const Matrix& w, const Matrix& b) {
  ParameterSet p;
  p.Add("fc.weight", w);
  p.Add("fc.bias", b);
  return p;
}

TEST_CASE("matrix rejects non-finite data and mismatched sizes") {
  CHECK_THROWS_AS(Matrix::FromData(2, 2, {1, 2, 3}), Error);
  try {
    Matrix::FromData(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()});
    FAIL("expected numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
  }
}

TEST_CASE("dense_forward zero and identity cases") {
  std::mt19937_64 rng(1);
  {
    Tape tape;
    ParameterSet p = DenseParams(RandomMatrix(4, 3, rng), Matrix(1, 3));
    Var y = DenseForward(tape, tape.Constant(Matrix(3, 4)), p, "fc",
                         Activation::kIdentity);
    CHECK(y.value() == Matrix(3, 3));
  }
  {
    Tape tape;
    ParameterSet p = DenseParams(Matrix::Identity(2), Matrix(1, 2));
    Var y = DenseForward(tape, tape.Constant(Matrix::Identity(2)), p, "fc",
                         Activation::kIdentity);
    CHECK(y.value() == Matrix::Identity(2));
  }
}

TEST_CASE("dense_forward shape and finiteness errors") {
  std::mt19937_64 rng(2);
  ParameterSet p = DenseParams(RandomMatrix(3, 2, rng), Matrix(1, 2));
  Tape tape;
  try {
    DenseForward(tape, tape.Constant(Matrix(2, 4)), p, "fc",
                 Activation::kTanh);
    FAIL("expected dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimension);
  }
  Matrix bad(1, 3);
  bad[1] = std::numeric_limits<double>::infinity();
  try {
    DenseForward(tape, tape.Constant(bad), p, "fc", Activation::kTanh);
    FAIL("expected numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
  }
}

TEST_CASE("dense_forward gradients match central differences") {
  std::mt19937_64 rng(3);
  ParameterSet p = DenseParams(RandomMatrix(3, 2, rng), RandomMatrix(1, 2, rng));
  p.Add("x", RandomMatrix(5, 3, rng));
  for (Activation act : {Activation::kIdentity, Activation::kTanh,
                         Activation::kSigmoid, Activation::kGelu}) {
    auto f = [act](Tape& tape, ParameterSet& ps) {
      Var y = DenseForward(tape, tape.Param(ps.at("x")), ps, "fc", act);
      return Sum(Mul(y, y));
    };
    GradCheckReport r = GradCheck(f, p, 1e-5, 1e-6);
    CHECK_MESSAGE(r.passed, ActivationName(act) << " worst " << r.worst);
  }
}

TEST_CASE("grad_check on sum of squares matches 2x") {
  ParameterSet p;
  p.Add("x", Matrix::FromRows({{0.3, -1.2, 2.5}}));
  auto f = [](Tape& tape, ParameterSet& ps) {
    Var x = tape.Param(ps.at("x"));
    return Sum(Mul(x, x));
  };
  auto grads = AnalyticGradients(f, p);
  CHECK(grads.at("x")[0] == doctest::Approx(0.6));
  CHECK(grads.at("x")[2] == doctest::Approx(5.0));
  GradCheckReport r = GradCheck(f, p, 1e-5, 1e-9);
  CHECK(r.passed);
  CHECK(r.worst < 1e-9);
}

TEST_CASE("grad_check flags exactly a corrupted entry") {
  std::mt19937_64 rng(4);
  ParameterSet p = DenseParams(RandomMatrix(3, 4, rng), RandomMatrix(1, 4, rng));
  const Matrix x = RandomMatrix(5, 3, rng);
  const Matrix target = RandomMatrix(5, 4, rng);
  auto f = [&](Tape& tape, ParameterSet& ps) {
    Var y = DenseForward(tape, tape.ConstantRef(x), ps, "fc",
                         Activation::kTanh);
    return CosineDistanceLoss(tape.ConstantRef(target), y);
  };
  auto grads = AnalyticGradients(f, p);
  CHECK(CompareGradients(f, p, grads, 1e-5, 1e-5).passed);
  grads.at("fc.weight")[7] *= 2.0;
  GradCheckReport r = CompareGradients(f, p, grads, 1e-5, 1e-5);
  REQUIRE(r.flagged.size() == 1);
  CHECK(r.flagged[0].name == "fc.weight");
  CHECK(r.flagged[0].index == 7);
}

TEST_CASE("grad_check detects a non-deterministic function") {
  ParameterSet p;
  p.Add("x", Matrix(1, 2, 1.0));
  int calls = 0;
  auto f = [&calls](Tape& tape, ParameterSet& ps) {
    ++calls;
    Var x = tape.Param(ps.at("x"));
    return Scale(Sum(x), static_cast<double>(calls));
  };
  auto grads = AnalyticGradients(f, p);
  try {
    CompareGradients(f, p, grads, 1e-5, 1e-5);
    FAIL("expected contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kContract);
  }
}

TEST_CASE("cosine_distance_loss reference values") {
  Tape tape;
  Matrix z = Matrix::FromRows({{1.0, 2.0, 0.5}, {-0.3, 0.8, 1.1}});
  Matrix neg = z;
  neg *= -1.0;
  // Rows orthogonal to the rows of z.
  Matrix orth = Matrix::FromRows({{2.0, -1.0, 0.0}, {1.1, 0.0, 0.3}});
  Var zv = tape.Constant(z);
  CHECK(CosineDistanceLoss(zv, tape.Constant(z)).value()[0] < 1e-6);
  CHECK(CosineDistanceLoss(zv, tape.Constant(orth)).value()[0] ==
        doctest::Approx(1.0));
  CHECK(CosineDistanceLoss(zv, tape.Constant(neg)).value()[0] ==
        doctest::Approx(2.0));
  // A zero frame counts as orthogonal.
  Matrix zero(2, 3);
  CHECK(CosineDistanceLoss(zv, tape.Constant(zero)).value()[0] ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(CosineDistanceLoss(zv, tape.Constant(Matrix(2, 2))), Error);
}

TEST_CASE("cosine_distance_loss range and per-frame scale invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    Tape tape;
    Matrix z = RandomMatrix(4, 6, rng);
    Matrix y = RandomMatrix(4, 6, rng);
    const double base =
        CosineDistanceLoss(tape.Constant(z), tape.Constant(y)).value()[0];
    CHECK(base >= 0.0);
    CHECK(base <= 2.0);
    Matrix y2 = y;
    const std::size_t frame = static_cast<std::size_t>(trial) % 4;
    const double s = scale(rng);
    for (double& v : y2.row(frame)) v *= s;
    Matrix z2 = z;
    const double sz = scale(rng);
    for (double& v : z2.row(3 - frame)) v *= sz;
    const double moved =
        CosineDistanceLoss(tape.Constant(z2), tape.Constant(y2)).value()[0];
    CHECK(moved == doctest::Approx(base).epsilon(1e-7));
  }
}

ParameterSet RandomLstm(std::size_t in, std::size_t layers, std::size_t hidden,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParameterSet p;
  AddBiLstmParams(p, "rnn", in, layers, hidden, rng);
  return p;
}

TEST_CASE("bilstm with zero weights outputs zeros") {
  ParameterSet p = RandomLstm(3, 2, 4, 6);
  for (auto& [name, param] : p) param.value.Fill(0.0);
  std::mt19937_64 rng(7);
  Tape tape;
  Var y = BiLstmForward(tape, tape.Constant(RandomMatrix(5, 3, rng)), p,
                        "rnn", 2, 4);
  CHECK(y.value() == Matrix(5, 8));
}

TEST_CASE("bilstm single frame: both directions see the same frame") {
  ParameterSet p = RandomLstm(3, 1, 4, 8);
  for (const char* leaf : {"w_ih", "w_hh", "b"}) {
    p.at(LstmParamName("rnn", 0, true, leaf)).value =
        p.at(LstmParamName("rnn", 0, false, leaf)).value;
  }
  std::mt19937_64 rng(9);
  Tape tape;
  Var y = BiLstmForward(tape, tape.Constant(RandomMatrix(1, 3, rng)), p,
                        "rnn", 1, 4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(y.value()(0, j) == y.value()(0, 4 + j));
}

TEST_CASE("bilstm rejects an empty sequence") {
  ParameterSet p = RandomLstm(3, 1, 2, 10);
  Tape tape;
  try {
    BiLstmForward(tape, tape.Constant(Matrix(0, 3)), p, "rnn", 1, 2);
    FAIL("expected empty-sequence error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptySequence);
  }
}

TEST_CASE("bilstm is equivariant under time reversal with swapped directions") {
  const std::size_t hidden = 3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ParameterSet p = RandomLstm(2, 2, hidden, 100 + seed);
    ParameterSet swapped = p;
    for (std::size_t l = 0; l < 2; ++l) {
      for (const char* leaf : {"w_ih", "w_hh", "b"}) {
        std::swap(swapped.at(LstmParamName("rnn", l, false, leaf)).value,
                  swapped.at(LstmParamName("rnn", l, true, leaf)).value);
      }
    }
    // The second layer reads [fwd | bwd] of the first, so its input rows must
    // follow the swap as well.
    for (bool bwd : {false, true}) {
      Matrix& w = swapped.at(LstmParamName("rnn", 1, bwd, "w_ih")).value;
      Matrix top = w.RowRange(0, hidden);
      Matrix bottom = w.RowRange(hidden, 2 * hidden);
      w = VStack({bottom, top});
    }
    std::mt19937_64 rng(seed);
    Matrix x = RandomMatrix(6, 2, rng);
    Matrix xr(6, 2);
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t c = 0; c < 2; ++c) xr(t, c) = x(5 - t, c);
    Tape tape;
    const Matrix y = BiLstmForward(tape, tape.Constant(x), p, "rnn", 2, hidden).value();
    const Matrix yr =
        BiLstmForward(tape, tape.Constant(xr), swapped, "rnn", 2, hidden).value();
    for (std::size_t t = 0; t < 6; ++t) {
      for (std::size_t j = 0; j < hidden; ++j) {
        CHECK(yr(t, j) == doctest::Approx(y(5 - t, hidden + j)).epsilon(1e-12));
        CHECK(yr(t, hidden + j) == doctest::Approx(y(5 - t, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("bilstm gate-weight gradients match central differences") {
  ParameterSet p = RandomLstm(3, 2, 4, 11);
  std::mt19937_64 rng(12);
  const Matrix x = RandomMatrix(3, 3, rng);
  const Matrix target = RandomMatrix(3, 8, rng);
  auto f = [&](Tape& tape, ParameterSet& ps) {
    Var y = BiLstmForward(tape, tape.ConstantRef(x), ps, "rnn", 2, 4);
    return Sum(Mul(Sub(y, tape.ConstantRef(target)),
                   Sub(y, tape.ConstantRef(target))));
  };
  GradCheckReport r = GradCheck(f, p, 1e-5, 1e-5);
  CHECK_MESSAGE(r.passed, "worst " << r.worst);
}

// Every differentiable primitive on random small shapes, 20 seeds.
TEST_CASE("primitive ops pass grad_check across seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    const std::size_t t = dim(rng);
    const std::size_t d = dim(rng) + 1;
    ParameterSet p;
    p.Add("a", RandomMatrix(t, d, rng));
    p.Add("b", RandomMatrix(t, d, rng));
    p.Add("w", RandomMatrix(d, 3, rng));
    p.Add("bias", RandomMatrix(1, 3, rng));
    p.Add("pos", RandomMatrix(t, d, rng, 0.2, 2.0));
    p.Add("lstm.w_ih", RandomMatrix(d, 8, rng));
    p.Add("lstm.w_hh", RandomMatrix(2, 8, rng));
    p.Add("lstm.b", RandomMatrix(1, 8, rng));
    std::vector<int> labels(t);
    for (std::size_t i = 0; i < t; ++i) labels[i] = static_cast<int>(i % 3);
    const Matrix shift = RandomMatrix(1, d, rng);
    const Matrix scale = RandomMatrix(1, d, rng, 0.5, 2.0);

    auto f = [&](Tape& tape, ParameterSet& ps) {
      Var a = tape.Param(ps.at("a"));
      Var b = tape.Param(ps.at("b"));
      Var h = AddRow(MatMul(Add(a, Mul(a, b)), tape.Param(ps.at("w"))),
                     tape.Param(ps.at("bias")));
      Var acts = ConcatCols({Activate(h, Activation::kTanh),
                             Activate(h, Activation::kSigmoid),
                             Activate(h, Activation::kGelu),
                             Exp(Scale(h, 0.3))});
      Var logs = LogFloor(tape.Param(ps.at("pos")), 1e-10);
      Var ctx = StackContext(DeltaTime(ColumnAffine(logs, shift, scale), 2), 3);
      Var rnn = LstmDirection(a, tape.Param(ps.at("lstm.w_ih")),
                              tape.Param(ps.at("lstm.w_hh")),
                              tape.Param(ps.at("lstm.b")), seed % 2 == 1);
      Var l1 = CosineDistanceLoss(SliceCols(acts, 0, 6), SliceCols(acts, 3, 9));
      Var l2 = MseLoss(ctx, Scale(StackContext(b, 3), 0.5));
      Var l3 = SoftmaxCrossEntropy(h, labels);
      Var l4 = Sum(Mul(rnn, rnn));
      return Add(Add(l1, l2), Add(Sub(l3, Mean(b)), l4));
    };
    GradCheckReport r = GradCheck(f, p, 1e-5, 1e-5);
    CHECK_MESSAGE(r.passed, "seed " << seed << " worst " << r.worst);
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParameterSet p;
  p.Add("w", Matrix::FromRows({{1.0, -2.0}, {0.5, 3.0}}));
  const Matrix before = p.at("w").value;
  OptimizerState state(1.7e-3);
  p.ZeroGrad();
  AdamStep(p, state);
  CHECK(p.at("w").value == before);
  CHECK(state.step == 1);
}

TEST_CASE("adam: first step equals lr * g / (|g| + eps)") {
  ParameterSet p;
  p.Add("w", Matrix(1, 1, 0.25));
  OptimizerState state(5e-4);
  const double g = -0.8;
  p.ZeroGrad();
  p.at("w").grad[0] = g;
  AdamStep(p, state);
  // m_hat = g, v_hat = g^2 after bias correction.
  const double expected = 0.25 - 5e-4 * g / (std::abs(g) + 1e-8);
  CHECK(p.at("w").value[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(p.at("w").grad[0] == 0.0);
}

TEST_CASE("adam: opposite gradients follow the moment recurrence") {
  ParameterSet p;
  p.Add("w", Matrix(1, 1, 1.0));
  OptimizerState state(0.1);
  // Scripted recurrence, written out step by step.
  double theta = 1.0, m = 0.0, v = 0.0;
  const double grads[] = {2.0, -2.0, 0.5};
  for (int k = 0; k < 3; ++k) {
    p.ZeroGrad();
    p.at("w").grad[0] = grads[k];
    AdamStep(p, state);
    m = 0.9 * m + 0.1 * grads[k];
    v = 0.999 * v + 0.001 * grads[k] * grads[k];
    const double mh = m / (1.0 - std::pow(0.9, k + 1));
    const double vh = v / (1.0 - std::pow(0.999, k + 1));
    theta -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(p.at("w").value[0] == doctest::Approx(theta).epsilon(1e-14));
  }
  // The second step moves less than the first: momentum partially cancels.
  CHECK(state.step == 3);
}

TEST_CASE("adam: missing gradient is a state error") {
  ParameterSet p;
  p.Add("w", Matrix(2, 2, 1.0));
  OptimizerState state(1e-3);
  try {
    AdamStep(p, state);
    FAIL("expected state error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kState);
  }
}

TEST_CASE("adam is deterministic and shape preserving") {
  std::mt19937_64 rng(13);
  ParameterSet a;
  a.Add("w", RandomMatrix(3, 4, rng));
  ParameterSet b = a;
  OptimizerState sa(1e-2), sb(1e-2);
  const Matrix g = RandomMatrix(3, 4, rng);
  for (int k = 0; k < 4; ++k) {
    for (ParameterSet* ps : {&a, &b}) {
      ps->ZeroGrad();
      ps->at("w").grad = g;
    }
    AdamStep(a, sa);
    AdamStep(b, sb);
  }
  CHECK(a.at("w").value == b.at("w").value);
  CHECK(a.at("w").value.rows() == 3);
  CHECK(a.at("w").value.cols() == 4);
}

TEST_CASE("frozen parameters receive no gradient and are not stepped") {
  ParameterSet p;
  p.Add("w", Matrix(1, 1, 2.0), /*trainable=*/false);
  p.Add("v", Matrix(1, 1, 3.0));
  Tape tape;
  Var loss = Mul(tape.Param(p.at("w")), tape.Param(p.at("v")));
  tape.Backward(loss);
  CHECK(p.at("v").grad[0] == 2.0);
  CHECK(p.at("w").grad[0] == 0.0);
  OptimizerState state(0.1);
  AdamStep(p, state);
  CHECK(p.at("w").value[0] == 2.0);
}

}  // namespace
}  // namespace artimit
