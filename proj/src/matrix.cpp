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

#include "condmeas/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "condmeas/errors.hpp"

namespace condmeas {

Matrix::Matrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged initializer rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (Index i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols_) throw DimensionError("ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (Index i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Vector Matrix::col(Index j) const {
  Vector v(rows_);
  for (Index i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::select_rows(std::span<const Index> idx) const {
  Matrix s(idx.size(), cols_);
  for (Index k = 0; k < idx.size(); ++k) {
    auto src = row(idx[k]);
    std::copy(src.begin(), src.end(), s.row(k).begin());
  }
  return s;
}

Matrix Matrix::principal(std::span<const Index> idx) const {
  Matrix s(idx.size(), idx.size());
  for (Index a = 0; a < idx.size(); ++a)
    for (Index b = 0; b < idx.size(); ++b) s(a, b) = (*this)(idx[a], idx[b]);
  return s;
}

Matrix Matrix::scaled(double s) const {
  Matrix r = *this;
  for (double& x : r.data_) x *= s;
  return r;
}

Matrix Matrix::outer_gram() const {
  Matrix g(rows_, rows_);
  for (Index i = 0; i < rows_; ++i)
    for (Index j = i; j < rows_; ++j) {
      const double v = dot(row(i), row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

Matrix Matrix::inner_gram() const {
  Matrix g(cols_, cols_);
  for (Index k = 0; k < rows_; ++k) {
    auto r = row(k);
    for (Index i = 0; i < cols_; ++i)
      for (Index j = i; j < cols_; ++j) g(i, j) += r[i] * r[j];
  }
  for (Index i = 0; i < cols_; ++i)
    for (Index j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("matrix sum: shapes differ");
  Matrix c(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("matrix difference: shapes differ");
  Matrix c(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
  Vector y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DimensionError("transpose product: size mismatch");
  Vector y(a.cols(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (Index j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) noexcept {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) {
    const double t = x / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shapes differ");
  double m = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace condmeas
