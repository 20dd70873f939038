/*
 * Copyright 2026 The resilient-cacc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cacc/interval_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cacc/errors.hpp"

namespace cacc {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

void require_square(const Matrix& m, const char* op) {
  if (!m.is_square()) {
    throw DimensionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
}

void require_same_length(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

template <typename F>
Matrix map_entries(const Matrix& m, F f) {
  Matrix out(m.rows(), m.cols());
  auto src = m.data();
  auto dst = out.data();
  std::transform(src.begin(), src.end(), dst.begin(), f);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw DimensionError("Matrix: rows and cols must be >= 1");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("Matrix: rows and cols must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::row(std::span<const double> values) {
  Matrix m(1, values.size());
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Vector Matrix::col(std::size_t c) const {
  if (c >= cols_) throw DimensionError("Matrix::col: index out of range");
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw DimensionError("operator*: inner dimensions " + std::to_string(lhs.cols()) + " vs " +
                         std::to_string(rhs.rows()));
  }
  Matrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Vector operator*(const Matrix& m, std::span<const double> v) {
  require_same_length(m.cols(), v.size(), "matrix-vector product");
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(double s, std::span<const double> v) {
  Vector out(v.begin(), v.end());
  for (double& x : out) x *= s;
  return out;
}

double max_abs(const Matrix& m) { return max_abs(m.data()); }

double max_abs(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

Matrix pos_part(const Matrix& m) {
  return map_entries(m, [](double x) { return x > 0.0 ? x : 0.0; });
}

// Written as a copy of -x rather than pos_part(M) - M so that
// pos_part(M) - neg_part(M) reproduces M bit for bit.
Matrix neg_part(const Matrix& m) {
  return map_entries(m, [](double x) { return x < 0.0 ? -x : 0.0; });
}

Matrix abs_mat(const Matrix& m) {
  return map_entries(m, [](double x) { return std::abs(x); });
}

DiagSplit diag_split(const Matrix& m) {
  require_square(m, "diag_split");
  DiagSplit s{Matrix(m.rows(), m.cols()), m};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s.diag(i, i) = m(i, i);
    s.off_diag(i, i) = 0.0;
  }
  return s;
}

Matrix metzlerize(const Matrix& m) {
  auto [d, nd] = diag_split(m);
  return d + abs_mat(nd);
}

UpDownSplit up_down_split(const Matrix& m) {
  auto [d, nd] = diag_split(m);
  return {d + pos_part(nd), neg_part(nd)};
}

bool is_metzler(const Matrix& m) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) < 0.0) return false;
  return true;
}

IntervalVector::IntervalVector(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_same_length(lower.size(), upper.size(), "IntervalVector");
}

bool IntervalVector::valid() const noexcept {
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) return false;
  return true;
}

bool interval_contains(const IntervalVector& iv, std::span<const double> z) {
  require_same_length(iv.size(), z.size(), "interval_contains");
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!(iv.lower[i] <= z[i] && z[i] <= iv.upper[i])) return false;
  return true;
}

Vector midpoint(const IntervalVector& iv) {
  Vector m(iv.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (iv.lower[i] + iv.upper[i]);
  return m;
}

Vector width(const IntervalVector& iv) { return sub(iv.upper, iv.lower); }

}  // namespace cacc
