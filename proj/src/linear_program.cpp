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

#include "cacc/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cacc/errors.hpp"

namespace cacc {

std::size_t LinearProgram::add_variable(std::string name, VariableSign sign) {
  names_.push_back(std::move(name));
  signs_.push_back(sign);
  objective_.push_back(0.0);
  return names_.size() - 1;
}

void LinearProgram::add_row(LinearTerms terms, Relation rel, double rhs, std::string label) {
  for (const auto& [idx, coef] : terms) {
    if (idx >= names_.size()) throw DimensionError("LinearProgram: row '" + label + "' references unknown variable");
    (void)coef;
  }
  rows_.push_back({std::move(terms), rel, rhs, std::move(label)});
}

void LinearProgram::set_objective(LinearTerms terms) {
  std::fill(objective_.begin(), objective_.end(), 0.0);
  for (const auto& [idx, coef] : terms) {
    if (idx >= names_.size()) throw DimensionError("LinearProgram: objective references unknown variable");
    objective_[idx] += coef;
  }
}

std::size_t LinearProgram::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DimensionError("LinearProgram: no variable named '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

double LinearProgram::max_violation(const Vector& x) const {
  if (x.size() != names_.size()) throw DimensionError("LinearProgram::max_violation: wrong length");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (signs_[i] == VariableSign::kNonnegative) worst = std::max(worst, -x[i]);
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& [idx, coef] : row.terms) lhs += coef * x[idx];
    switch (row.relation) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - row.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

double LinearProgram::evaluate_objective(const Vector& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += objective_[i] * x[i];
  return s;
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  double& cost(std::size_t c) { return cost_[c]; }
  double& cost_rhs() { return cost_[cols_]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t basis(std::size_t r) const { return basis_[r]; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = cost_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= f * at(r, j);
      cost_[c] = 0.0;
    }
    basis_[r] = c;
  }

  /// Reduced costs for column costs `c` given the current basis.
  void price(const Vector& c) {
    for (std::size_t j = 0; j < cols_; ++j) cost_[j] = c[j];
    cost_[cols_] = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= cb * at(i, j);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
};

enum class Outcome { kOptimal, kUnbounded };

Outcome run_simplex(Tableau& t, const std::vector<bool>& barred, const SimplexOptions& opts,
                    std::size_t& pivots) {
  for (;;) {
    std::size_t enter = t.cols();
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (!barred[j] && t.cost(j) < -opts.optimality_tol) {
        enter = j;
        break;
      }
    }
    if (enter == t.cols()) return Outcome::kOptimal;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a > opts.feasibility_tol) best = std::min(best, std::max(t.rhs(i), 0.0) / a);
    }
    // Bland: among (near-)tied ratios leave on the smallest basic index.
    std::size_t leave = t.rows();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= opts.feasibility_tol) continue;
      if (std::max(t.rhs(i), 0.0) / a > best + opts.feasibility_tol) continue;
      if (leave == t.rows() || t.basis(i) < t.basis(leave)) leave = i;
    }
    if (leave == t.rows()) return Outcome::kUnbounded;
    t.pivot(leave, enter);
    if (++pivots > opts.max_pivots)
      throw SynthesisError(SynthesisError::Kind::kInternal, "simplex: pivot limit exceeded");
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
  const std::size_t n = lp.variable_count();
  const std::size_t m = lp.row_count();

  // Column layout: structural columns (free variables take two), then one
  // slack/surplus per inequality row, then one artificial per row that needs it.
  std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
  std::size_t ncols = 0;
  for (std::size_t v = 0; v < n; ++v) {
    pos_col[v] = ncols++;
    if (lp.sign(v) == VariableSign::kFree) neg_col[v] = ncols++;
  }
  const std::size_t structural = ncols;

  struct Normalized {
    Vector coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<Normalized> rows;
  rows.reserve(m);
  for (const auto& row : lp.rows()) {
    Normalized nr{Vector(structural, 0.0), row.relation, row.rhs};
    for (const auto& [idx, coef] : row.terms) {
      nr.coeffs[pos_col[idx]] += coef;
      if (neg_col[idx] != SIZE_MAX) nr.coeffs[neg_col[idx]] -= coef;
    }
    if (nr.rhs < 0.0) {
      for (double& c : nr.coeffs) c = -c;
      nr.rhs = -nr.rhs;
      if (nr.rel == Relation::kLessEqual) nr.rel = Relation::kGreaterEqual;
      else if (nr.rel == Relation::kGreaterEqual) nr.rel = Relation::kLessEqual;
    }
    rows.push_back(std::move(nr));
  }

  std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].rel != Relation::kEqual) slack_col[i] = ncols++;
  const std::size_t first_art = ncols;
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].rel != Relation::kLessEqual) art_col[i] = ncols++;

  Tableau t(m, ncols);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < structural; ++j) t.at(i, j) = rows[i].coeffs[j];
    t.rhs(i) = rows[i].rhs;
    if (slack_col[i] != SIZE_MAX) t.at(i, slack_col[i]) = rows[i].rel == Relation::kLessEqual ? 1.0 : -1.0;
    if (art_col[i] != SIZE_MAX) {
      t.at(i, art_col[i]) = 1.0;
      t.basis(i) = art_col[i];
    } else {
      t.basis(i) = slack_col[i];
    }
  }

  std::size_t pivots = 0;
  std::vector<bool> barred(ncols, false);

  // Phase one: minimise the sum of artificials.
  if (first_art < ncols) {
    Vector c1(ncols, 0.0);
    for (std::size_t j = first_art; j < ncols; ++j) c1[j] = 1.0;
    t.price(c1);
    run_simplex(t, barred, opts, pivots);

    double infeas = 0.0;
    std::vector<std::size_t> violated;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis(i) >= first_art && t.rhs(i) > opts.feasibility_tol) {
        infeas += t.rhs(i);
        for (std::size_t r = 0; r < m; ++r)
          if (art_col[r] == t.basis(i)) violated.push_back(r);
      }
    }
    if (!violated.empty()) {
      std::sort(violated.begin(), violated.end());
      std::string msg = "linear program infeasible (residual " + std::to_string(infeas) + "); rows:";
      for (std::size_t r : violated) msg += " '" + lp.rows()[r].label + "'";
      throw SynthesisError(SynthesisError::Kind::kInfeasible, msg, violated);
    }

    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis(i) < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > opts.feasibility_tol) {
          t.pivot(i, j);
          ++pivots;
          break;
        }
      }
    }
    for (std::size_t j = first_art; j < ncols; ++j) barred[j] = true;
  }

  // Phase two.
  Vector c2(ncols, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    c2[pos_col[v]] = lp.objective()[v];
    if (neg_col[v] != SIZE_MAX) c2[neg_col[v]] = -lp.objective()[v];
  }
  t.price(c2);
  if (run_simplex(t, barred, opts, pivots) == Outcome::kUnbounded)
    throw SynthesisError(SynthesisError::Kind::kUnbounded, "linear program unbounded");

  Vector col_value(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) col_value[t.basis(i)] = t.rhs(i);

  LpSolution sol;
  sol.x.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    sol.x[v] = col_value[pos_col[v]];
    if (neg_col[v] != SIZE_MAX) sol.x[v] -= col_value[neg_col[v]];
  }
  sol.objective = lp.evaluate_objective(sol.x);
  sol.pivots = pivots;
  return sol;
}

}  // namespace cacc
