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

#include <doctest.h>

#include <random>

#include "cacc/errors.hpp"
#include "cacc/interval_algebra.hpp"

using namespace cacc;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  Matrix m(r, c);
  for (double& x : m.data()) x = d(rng);
  // Exercise signed zeros and exact zeros too.
  m(0, 0) = (rng() & 1) ? 0.0 : -0.0;
  return m;
}

}  // namespace

TEST_SUITE("interval_algebra") {

TEST_CASE("positive and negative parts") {
  const Matrix m{{1, -2}, {3, -4}};
  CHECK(pos_part(m) == Matrix{{1, 0}, {3, 0}});
  CHECK(neg_part(m) == Matrix{{0, 2}, {0, 4}});
  CHECK(abs_mat(m) == Matrix{{1, 2}, {3, 4}});
  CHECK(pos_part(Matrix(2, 2)) == Matrix(2, 2));
  CHECK(neg_part(Matrix(2, 2)) == Matrix(2, 2));
  CHECK(pos_part(Matrix{{0.5}}) == Matrix{{0.5}});
  CHECK(neg_part(Matrix{{-1}}) == Matrix{{1}});
  CHECK(abs_mat(Matrix::identity(3)) == Matrix::identity(3));
  CHECK(abs_mat(Matrix{{-0.5, 0}}) == Matrix{{0.5, 0}});
}

TEST_CASE("diag split and metzlerize") {
  const Matrix m{{1, -2}, {3, -4}};
  const DiagSplit s = diag_split(m);
  CHECK(s.diag == Matrix{{1, 0}, {0, -4}});
  CHECK(s.off_diag == Matrix{{0, -2}, {3, 0}});
  const Matrix d{{2, 0}, {0, -3}};
  CHECK(diag_split(d).diag == d);
  CHECK(diag_split(d).off_diag == Matrix(2, 2));
  const Matrix swap{{0, 1}, {1, 0}};
  CHECK(diag_split(swap).diag == Matrix(2, 2));
  CHECK(diag_split(swap).off_diag == swap);

  CHECK(metzlerize(m) == Matrix{{1, 2}, {3, -4}});
  const Matrix metzler{{-1, 2}, {0.5, -3}};
  CHECK(metzlerize(metzler) == metzler);
  CHECK(metzlerize(Matrix{{-1, -1}, {-1, -1}}) == Matrix{{-1, 1}, {1, -1}});
}

TEST_CASE("up/down split") {
  const UpDownSplit a = up_down_split(Matrix{{0, 1}, {0, -1.78}});
  CHECK(a.up == Matrix{{0, 1}, {0, -1.78}});
  CHECK(a.down == Matrix(2, 2));
  const UpDownSplit b = up_down_split(Matrix{{1, -2}, {3, -4}});
  CHECK(b.up == Matrix{{1, 0}, {3, -4}});
  CHECK(b.down == Matrix{{0, 2}, {0, 0}});
  const Matrix d{{5, 0}, {0, 7}};
  CHECK(up_down_split(d).up == d);
  CHECK(up_down_split(d).down == Matrix(2, 2));
}

TEST_CASE("non-square inputs are rejected") {
  const Matrix r(2, 3);
  CHECK_THROWS_AS(diag_split(r), DimensionError);
  CHECK_THROWS_AS(metzlerize(r), DimensionError);
  CHECK_THROWS_AS(up_down_split(r), DimensionError);
  CHECK_THROWS_AS(Matrix(0, 2), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2) * Matrix(3, 1), DimensionError);
}

TEST_CASE("decomposition identities hold exactly on random matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    const Matrix m = random_matrix(rng, n, n);
    const Matrix p = pos_part(m), q = neg_part(m);
    const DiagSplit s = diag_split(m);
    const UpDownSplit ud = up_down_split(m);
    const Matrix mz = metzlerize(m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(p(i, j) - q(i, j) == m(i, j));
        REQUIRE(p(i, j) >= 0.0);
        REQUIRE(q(i, j) >= 0.0);
        REQUIRE(abs_mat(m)(i, j) == std::abs(m(i, j)));
        REQUIRE(s.diag(i, j) + s.off_diag(i, j) == m(i, j));
        REQUIRE(ud.up(i, j) - ud.down(i, j) == m(i, j));
        REQUIRE(ud.down(i, j) >= 0.0);
        if (i != j) {
          REQUIRE(mz(i, j) >= 0.0);
          REQUIRE(ud.up(i, j) >= 0.0);
        } else {
          REQUIRE(ud.down(i, j) == 0.0);
          REQUIRE(s.off_diag(i, j) == 0.0);
        }
      }
    REQUIRE(is_metzler(mz));
    REQUIRE(is_metzler(ud.up));
  }
}

TEST_CASE("interval containment and midpoint") {
  const IntervalVector iv({1, 1}, {3, 3});
  CHECK(interval_contains(iv, Vector{2, 2}));
  CHECK_FALSE(interval_contains(iv, Vector{0, 2}));
  CHECK(interval_contains(IntervalVector({2}, {2}), Vector{2}));
  CHECK_THROWS_AS(interval_contains(iv, Vector{2}), DimensionError);

  CHECK(midpoint(IntervalVector({1}, {3})) == Vector{2});
  CHECK(midpoint(IntervalVector({-1}, {1})) == Vector{0});
  CHECK(midpoint(IntervalVector({0, 2}, {4, 2})) == Vector{2, 2});
  CHECK(width(IntervalVector({0, 2}, {4, 2})) == Vector{4, 0});
  CHECK_FALSE(IntervalVector({1}, {0}).valid());

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int k = 0; k < 10000; ++k) {
    double a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    const IntervalVector r({a}, {b});
    REQUIRE(interval_contains(r, midpoint(r)));
  }
}

TEST_CASE("matrix arithmetic") {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  CHECK(a * b == Matrix{{2, 1}, {4, 3}});
  CHECK(a + b == Matrix{{1, 3}, {4, 4}});
  CHECK(a - a == Matrix(2, 2));
  CHECK(2.0 * a == Matrix{{2, 4}, {6, 8}});
  CHECK(a.transposed() == Matrix{{1, 3}, {2, 4}});
  CHECK(a * Vector{1, 1} == Vector{3, 7});
  CHECK(frobenius_norm(Matrix{{3, 4}}) == doctest::Approx(5.0));
}

}  // TEST_SUITE
