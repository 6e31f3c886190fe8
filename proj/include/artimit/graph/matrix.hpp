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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace artimit {

/// Dense row-major matrix of 64-bit reals. All training math runs on this
/// type; file formats narrow to f32 on save.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  /// Takes ownership of `values`; throws kDimension if the size does not
  /// match and kNumeric if any value is NaN or infinite.
  static Matrix FromData(std::size_t rows, std::size_t cols,
                         std::vector<double> values);
  static Matrix FromRows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  void Fill(double v);
  bool AllFinite() const;
  bool SameShape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string ShapeString() const;

  Matrix Transposed() const;
  /// Rows [begin, end).
  Matrix RowRange(std::size_t begin, std::size_t end) const;
  /// Columns [begin, end).
  Matrix ColRange(std::size_t begin, std::size_t end) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Products backed by Eigen maps over the row-major storage.
Matrix MatMul(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix MatMulTN(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix MatMulNT(const Matrix& a, const Matrix& b);
/// out += a * b (shapes must already agree).
void MatMulAccumulate(const Matrix& a, const Matrix& b, Matrix& out);
void MatMulTNAccumulate(const Matrix& a, const Matrix& b, Matrix& out);
void MatMulNTAccumulate(const Matrix& a, const Matrix& b, Matrix& out);

Matrix VStack(const std::vector<Matrix>& parts);
Matrix HStack(const std::vector<Matrix>& parts);

double MaxAbsDiff(const Matrix& a, const Matrix& b);

void RequireShape(const Matrix& m, std::size_t rows, std::size_t cols,
                  const std::string& what);
void RequireFinite(const Matrix& m, const std::string& what);

}  // namespace artimit
