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

#include "artimit/graph/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "artimit/common/error.hpp"

namespace artimit {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap View(const Matrix& m) {
  return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}
MutMap View(Matrix& m) {
  return MutMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}

void RequireProduct(std::size_t inner_a, std::size_t inner_b,
                    const Matrix& a, const Matrix& b, const char* op) {
  if (inner_a != inner_b) {
    Fail(ErrorKind::kDimension, std::string(op) + ": incompatible shapes " +
                                    a.ShapeString() + " and " +
                                    b.ShapeString());
  }
}

}  // namespace

Matrix Matrix::FromData(std::size_t rows, std::size_t cols,
                        std::vector<double> values) {
  if (values.size() != rows * cols) {
    Fail(ErrorKind::kDimension,
         "matrix data has " + std::to_string(values.size()) +
             " values, expected " + std::to_string(rows) + "x" +
             std::to_string(cols));
  }
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.values_ = std::move(values);
  RequireFinite(m, "matrix data");
  return m;
}

Matrix Matrix::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) Fail(ErrorKind::kDimension, "ragged matrix rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return FromData(r, c, std::move(values));
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::Fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Matrix::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Matrix::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix Matrix::Transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::RowRange(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_)
    Fail(ErrorKind::kDimension, "row range out of bounds");
  Matrix out(end - begin, cols_);
  std::copy(values_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
            values_.begin() + static_cast<std::ptrdiff_t>(end * cols_),
            out.values_.begin());
  return out;
}

Matrix Matrix::ColRange(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols_)
    Fail(ErrorKind::kDimension, "column range out of bounds");
  Matrix out(rows_, end - begin);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = (*this)(r, c);
  return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (!SameShape(other))
    Fail(ErrorKind::kDimension, "+=: shape mismatch " + ShapeString() +
                                    " vs " + other.ShapeString());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (!SameShape(other))
    Fail(ErrorKind::kDimension, "-=: shape mismatch " + ShapeString() +
                                    " vs " + other.ShapeString());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  RequireProduct(a.cols(), b.rows(), a, b, "matmul");
  Matrix out(a.rows(), b.cols());
  View(out).noalias() = View(a) * View(b);
  return out;
}

Matrix MatMulTN(const Matrix& a, const Matrix& b) {
  RequireProduct(a.rows(), b.rows(), a, b, "matmul_tn");
  Matrix out(a.cols(), b.cols());
  View(out).noalias() = View(a).transpose() * View(b);
  return out;
}

Matrix MatMulNT(const Matrix& a, const Matrix& b) {
  RequireProduct(a.cols(), b.cols(), a, b, "matmul_nt");
  Matrix out(a.rows(), b.rows());
  View(out).noalias() = View(a) * View(b).transpose();
  return out;
}

void MatMulAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  View(out).noalias() += View(a) * View(b);
}

void MatMulTNAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  View(out).noalias() += View(a).transpose() * View(b);
}

void MatMulNTAccumulate(const Matrix& a, const Matrix& b, Matrix& out) {
  View(out).noalias() += View(a) * View(b).transpose();
}

Matrix VStack(const std::vector<Matrix>& parts) {
  if (parts.empty()) return {};
  std::size_t rows = 0;
  const std::size_t cols = parts.front().cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) Fail(ErrorKind::kDimension, "vstack: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.values().begin(), p.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.size();
  }
  return out;
}

Matrix HStack(const std::vector<Matrix>& parts) {
  if (parts.empty()) return {};
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) Fail(ErrorKind::kDimension, "hstack: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t c0 = 0;
    for (const auto& p : parts) {
      for (std::size_t c = 0; c < p.cols(); ++c) out(r, c0 + c) = p(r, c);
      c0 += p.cols();
    }
  }
  return out;
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  if (!a.SameShape(b))
    Fail(ErrorKind::kDimension, "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void RequireShape(const Matrix& m, std::size_t rows, std::size_t cols,
                  const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    Fail(ErrorKind::kDimension, what + ": expected " + std::to_string(rows) +
                                    "x" + std::to_string(cols) + ", got " +
                                    m.ShapeString());
  }
}

void RequireFinite(const Matrix& m, const std::string& what) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m[i])) {
      Fail(ErrorKind::kNumeric, what + ": non-finite value at flat index " +
                                    std::to_string(i));
    }
  }
}

}  // namespace artimit
