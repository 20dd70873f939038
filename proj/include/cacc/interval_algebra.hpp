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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace cacc {

using Vector = std::vector<double>;

/// Dense row-major matrix. Shapes here are tiny (2x2, 2x1), so every
/// operation checks dimensions instead of trying to be clever.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);
  static Matrix row(std::span<const double> values);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  /// Column `c` as a vector.
  Vector col(std::size_t c) const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(double s, Matrix m);
Vector operator*(const Matrix& m, std::span<const double> v);

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(double s, std::span<const double> v);

/// Largest absolute entry.
double max_abs(const Matrix& m);
double max_abs(std::span<const double> v);
double frobenius_norm(const Matrix& m);

/// Elementwise max(M, 0). Entries are copied or zeroed, never combined.
Matrix pos_part(const Matrix& m);
/// pos_part(M) - M, i.e. elementwise max(-M, 0).
Matrix neg_part(const Matrix& m);
/// Elementwise absolute value.
Matrix abs_mat(const Matrix& m);

struct DiagSplit {
  Matrix diag;
  Matrix off_diag;
};
/// (M^d, M^nd) with M^d + M^nd = M.
DiagSplit diag_split(const Matrix& m);

/// M^d + |M^nd|: same diagonal, off-diagonals replaced by their magnitude.
Matrix metzlerize(const Matrix& m);

struct UpDownSplit {
  Matrix up;    ///< M^d + (M^nd)^+, Metzler
  Matrix down;  ///< (M^nd)^-, nonnegative with zero diagonal
};
/// Split used by cooperative framer dynamics; up - down == M exactly.
UpDownSplit up_down_split(const Matrix& m);

bool is_metzler(const Matrix& m);

/// Elementwise framer pair [lower, upper].
struct IntervalVector {
  Vector lower;
  Vector upper;

  IntervalVector(Vector lo, Vector hi);

  std::size_t size() const noexcept { return lower.size(); }
  /// True when lower <= upper in every component.
  bool valid() const noexcept;
};

bool interval_contains(const IntervalVector& iv, std::span<const double> z);
Vector midpoint(const IntervalVector& iv);
Vector width(const IntervalVector& iv);

}  // namespace cacc
