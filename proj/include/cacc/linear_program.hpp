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
#include <string>
#include <utility>
#include <vector>

#include "cacc/interval_algebra.hpp"

namespace cacc {

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

enum class VariableSign { kNonnegative, kFree };

/// A sparse linear term list: (variable index, coefficient).
using LinearTerms = std::vector<std::pair<std::size_t, double>>;

/// min c^T x  subject to rows (a_i^T x  rel_i  b_i) and per-variable sign.
class LinearProgram {
 public:
  struct Row {
    LinearTerms terms;
    Relation relation;
    double rhs;
    std::string label;
  };

  std::size_t add_variable(std::string name, VariableSign sign = VariableSign::kNonnegative);
  void add_row(LinearTerms terms, Relation rel, double rhs, std::string label);
  void set_objective(LinearTerms terms);

  std::size_t variable_count() const noexcept { return names_.size(); }
  std::size_t row_count() const noexcept { return rows_.size(); }
  const std::string& variable_name(std::size_t i) const { return names_.at(i); }
  VariableSign sign(std::size_t i) const { return signs_.at(i); }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  const Vector& objective() const noexcept { return objective_; }

  /// Index of a named variable; throws if absent.
  std::size_t index_of(const std::string& name) const;

  /// Largest violation of any row or sign constraint at x (0 when feasible).
  double max_violation(const Vector& x) const;
  double evaluate_objective(const Vector& x) const;

 private:
  std::vector<std::string> names_;
  std::vector<VariableSign> signs_;
  std::vector<Row> rows_;
  Vector objective_;
};

struct LpSolution {
  Vector x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t max_pivots = 200000;
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
/// Throws SynthesisError (kInfeasible with the offending rows, or kUnbounded).
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

}  // namespace cacc
