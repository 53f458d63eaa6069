// Copyright 2026 The condmeas Authors
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
#include <vector>

namespace condmeas {

using Vector = std::vector<double>;
using Index = std::size_t;
using Subset = std::vector<Index>;  // sorted, zero-based row indices

// Dense row-major real matrix. Sizes here are tiny (m <= ~20), so storage is
// a flat std::vector and every operation returns a new value.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(Index n);
  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix diagonal(std::span<const double> d);
  static Matrix column(std::span<const double> v);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(Index i, Index j) noexcept { return data_[i * cols_ + j]; }
  double operator()(Index i, Index j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(Index i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(Index i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  Vector col(Index j) const;
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  Matrix select_rows(std::span<const Index> idx) const;
  Matrix principal(std::span<const Index> idx) const;  // G[idx, idx]
  Matrix scaled(double s) const;

  // A * A^T and A^T * A.
  Matrix outer_gram() const;
  Matrix inner_gram() const;

  bool all_finite() const noexcept;
  double max_abs() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Vector transpose_times(const Matrix& a, std::span<const double> x);  // A^T x

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> v) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace condmeas
