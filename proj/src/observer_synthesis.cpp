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

#include "cacc/observer_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cacc/errors.hpp"

namespace cacc {
namespace {

using Block = std::vector<std::size_t>;

Block add_block(LinearProgram& lp, const std::string& name, std::size_t rows, std::size_t cols,
                VariableSign sign) {
  Block b;
  b.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      b.push_back(lp.add_variable(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]", sign));
  return b;
}

struct Split {
  Block pos;
  Block neg;
};

/// S = S^p - S^n with S^p, S^n >= 0.
Split add_split(LinearProgram& lp, const std::string& name, const Block& s, std::size_t rows,
                std::size_t cols) {
  Split sp{add_block(lp, name + "^p", rows, cols, VariableSign::kNonnegative),
           add_block(lp, name + "^n", rows, cols, VariableSign::kNonnegative)};
  for (std::size_t k = 0; k < s.size(); ++k)
    lp.add_row({{s[k], 1.0}, {sp.pos[k], -1.0}, {sp.neg[k], 1.0}}, Relation::kEqual, 0.0,
               "split " + lp.variable_name(s[k]));
  return sp;
}

/// Sum = S^p + S^n.
Block add_abs_bound(LinearProgram& lp, const std::string& name, const Split& sp, std::size_t rows,
                    std::size_t cols) {
  Block sum = add_block(lp, name, rows, cols, VariableSign::kNonnegative);
  for (std::size_t k = 0; k < sum.size(); ++k)
    lp.add_row({{sum[k], 1.0}, {sp.pos[k], -1.0}, {sp.neg[k], -1.0}}, Relation::kEqual, 0.0,
               "def " + lp.variable_name(sum[k]));
  return sum;
}

/// out = lhs_block (rows x inner) * rhs (inner x cols), as equality rows.
Block add_product(LinearProgram& lp, const std::string& name, const Block& lhs, std::size_t rows,
                  std::size_t inner, const Matrix& rhs) {
  Block out = add_block(lp, name, rows, rhs.cols(), VariableSign::kFree);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
      LinearTerms terms{{out[i * rhs.cols() + j], 1.0}};
      for (std::size_t k = 0; k < inner; ++k)
        if (rhs(k, j) != 0.0) terms.emplace_back(lhs[i * inner + k], -rhs(k, j));
      lp.add_row(std::move(terms), Relation::kEqual, 0.0, "def " + lp.variable_name(out[i * rhs.cols() + j]));
    }
  return out;
}

Matrix read_block(const Vector& x, const Block& b, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = x[b[i * cols + j]];
  return m;
}

void check_plant(const PlantMatrices& p) {
  const std::size_t n = p.A.rows();
  if (!p.A.is_square()) throw DimensionError("plant: A must be square");
  if (p.B.rows() != n || p.W.rows() != n) throw DimensionError("plant: B and W need A's row count");
  if (p.C.cols() != n) throw DimensionError("plant: C needs A's column count");
  if (p.V.rows() != p.C.rows()) throw DimensionError("plant: V needs C's row count");
}

}  // namespace

void SynthesisProblem::validate() const {
  check_plant(plant);
  if (!(disturbance_width >= 0.0) || !(noise_width >= 0.0) || !(attack_width >= 0.0))
    throw ConfigError("synthesis: noise widths must be >= 0");
  if (!(margin > 0.0)) throw ConfigError("synthesis: margin must be > 0");
  if (!(q_cap > 0.0)) throw ConfigError("synthesis: q_cap must be > 0");
}

DerivedObserverMatrices derive_observer_matrices(const ObserverGains& g, const PlantMatrices& p) {
  check_plant(p);
  Matrix mx = g.T * p.A - g.L * p.C;
  auto [up, down] = up_down_split(mx);
  Matrix mv = mx * g.N + g.L;
  return {mx, up, down, g.T * p.W, mv, g.T * p.B, g.N * p.V};
}

SynthesisLp build_lp(const SynthesisProblem& prob) {
  prob.validate();
  const PlantMatrices& p = prob.plant;
  const std::size_t n = p.A.rows();
  const std::size_t m = p.C.rows();
  const std::size_t nv = p.V.cols();
  const double eps = prob.margin;

  // Disturbance channels: W, optionally followed by the attack channel B.
  Matrix w_aug = p.W;
  Vector w_width(p.W.cols(), prob.disturbance_width);
  if (prob.attack_width > 0.0) {
    w_aug = Matrix(n, p.W.cols() + p.B.cols());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p.W.cols(); ++j) w_aug(i, j) = p.W(i, j);
      for (std::size_t j = 0; j < p.B.cols(); ++j) w_aug(i, p.W.cols() + j) = p.B(i, j);
    }
    w_width.insert(w_width.end(), p.B.cols(), prob.attack_width);
  }
  const std::size_t nw = w_aug.cols();

  SynthesisLp out;
  out.n = n;
  out.m = m;
  LinearProgram& lp = out.lp;

  out.gamma = lp.add_variable("gamma");
  for (std::size_t i = 0; i < n; ++i) {
    out.q.push_back(lp.add_variable("Q[" + std::to_string(i) + "]"));
    lp.add_row({{out.q.back(), 1.0}}, Relation::kGreaterEqual, eps, "Q > 0 [" + std::to_string(i) + "]");
  }
  out.l_tilde = add_block(lp, "L~", n, m, VariableSign::kFree);
  out.n_tilde = add_block(lp, "N~", n, m, VariableSign::kFree);
  out.t_tilde = add_block(lp, "T~", n, n, VariableSign::kFree);

  // T~ = Q - N~ C
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      LinearTerms terms{{out.t_tilde[i * n + j], 1.0}};
      if (i == j) terms.emplace_back(out.q[i], -1.0);
      for (std::size_t k = 0; k < m; ++k)
        if (p.C(k, j) != 0.0) terms.emplace_back(out.n_tilde[i * m + k], p.C(k, j));
      lp.add_row(std::move(terms), Relation::kEqual, 0.0, "T~ = Q - N~C [" + std::to_string(i) + "," + std::to_string(j) + "]");
    }

  add_split(lp, "T~", out.t_tilde, n, n);
  add_split(lp, "L~", out.l_tilde, n, m);
  add_split(lp, "N~", out.n_tilde, n, m);

  // Delta >= |T~ W|, Gamma >= |N~ V|, Phi >= |L~ V|.
  Block tw = add_product(lp, "T~W", out.t_tilde, n, n, w_aug);
  Block delta = add_abs_bound(lp, "Delta", add_split(lp, "T~W", tw, n, nw), n, nw);
  Block nvb = add_product(lp, "N~V", out.n_tilde, n, m, p.V);
  Block gam = add_abs_bound(lp, "Gamma", add_split(lp, "N~V", nvb, n, nv), n, nv);
  Block lvb = add_product(lp, "L~V", out.l_tilde, n, m, p.V);
  Block phi = add_abs_bound(lp, "Phi", add_split(lp, "L~V", lvb, n, nv), n, nv);

  // M~x = T~ A - L~ C.
  Block mx = add_block(lp, "M~x", n, n, VariableSign::kFree);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      LinearTerms terms{{mx[i * n + j], 1.0}};
      for (std::size_t k = 0; k < n; ++k)
        if (p.A(k, j) != 0.0) terms.emplace_back(out.t_tilde[i * n + k], -p.A(k, j));
      for (std::size_t k = 0; k < m; ++k)
        if (p.C(k, j) != 0.0) terms.emplace_back(out.l_tilde[i * m + k], p.C(k, j));
      lp.add_row(std::move(terms), Relation::kEqual, 0.0, "M~x = T~A - L~C [" + std::to_string(i) + "," + std::to_string(j) + "]");
    }

  // Diagonal / off-diagonal parts and their sign splits.
  Block mxd = add_block(lp, "M~x^d", n, n, VariableSign::kFree);
  Block mxnd = add_block(lp, "M~x^nd", n, n, VariableSign::kFree);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      const std::size_t on = i == j ? mxd[k] : mxnd[k];
      const std::size_t off = i == j ? mxnd[k] : mxd[k];
      lp.add_row({{on, 1.0}, {mx[k], -1.0}}, Relation::kEqual, 0.0, "diag split " + lp.variable_name(on));
      lp.add_row({{off, 1.0}}, Relation::kEqual, 0.0, "zero " + lp.variable_name(off));
    }
  add_split(lp, "M~x^d", mxd, n, n);
  Split nd = add_split(lp, "M~x^nd", mxnd, n, n);

  // Omega = M~x^d + M~x^{nd,p} + M~x^{nd,n}.
  out.omega = add_block(lp, "Omega", n, n, VariableSign::kFree);
  for (std::size_t k = 0; k < n * n; ++k)
    lp.add_row({{out.omega[k], 1.0}, {mxd[k], -1.0}, {nd.pos[k], -1.0}, {nd.neg[k], -1.0}},
               Relation::kEqual, 0.0, "def " + lp.variable_name(out.omega[k]));

  // 1^T Omega < -1^T on every column the gains can influence.
  out.structurally_zero_column.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    bool zero = true;
    for (std::size_t k = 0; k < n; ++k) zero = zero && p.A(k, j) == 0.0;
    for (std::size_t k = 0; k < m; ++k) zero = zero && p.C(k, j) == 0.0;
    out.structurally_zero_column[j] = zero;
    // A state that neither feeds the dynamics nor the output cannot be
    // corrected; output injection into its row would only couple the other
    // input channels into it, so that row keeps T = e_j^T, L = N = 0.
    if (zero)
      for (std::size_t k = 0; k < m; ++k) {
        lp.add_row({{out.n_tilde[j * m + k], 1.0}}, Relation::kEqual, 0.0, "pin N~ row " + std::to_string(j));
        lp.add_row({{out.l_tilde[j * m + k], 1.0}}, Relation::kEqual, 0.0, "pin L~ row " + std::to_string(j));
      }
    LinearTerms terms;
    for (std::size_t i = 0; i < n; ++i) terms.emplace_back(out.omega[i * n + j], 1.0);
    lp.add_row(std::move(terms), Relation::kLessEqual, zero ? 0.0 : -1.0 - eps,
               "stability column " + std::to_string(j));
  }

  // 1^T [Delta Gamma Phi] (weighted by channel width) < gamma 1^T.
  auto add_gain_rows = [&](const Block& blk, std::size_t cols, const Vector& widths, const std::string& tag) {
    for (std::size_t j = 0; j < cols; ++j) {
      LinearTerms terms{{out.gamma, -1.0}};
      if (widths[j] != 0.0)
        for (std::size_t i = 0; i < n; ++i) terms.emplace_back(blk[i * cols + j], widths[j]);
      lp.add_row(std::move(terms), Relation::kLessEqual, -eps, "L1 bound " + tag + " column " + std::to_string(j));
    }
  };
  add_gain_rows(delta, nw, w_width, "Delta");
  add_gain_rows(gam, nv, Vector(nv, prob.noise_width), "Gamma");
  add_gain_rows(phi, nv, Vector(nv, prob.noise_width), "Phi");

  lp.set_objective({{out.gamma, 1.0}});
  return out;
}

std::pair<ObserverGains, DerivedObserverMatrices> reconstruct_gains(const Vector& x,
                                                                    const SynthesisLp& layout,
                                                                    const SynthesisProblem& prob) {
  const std::size_t n = layout.n;
  const std::size_t m = layout.m;
  if (x.size() != layout.lp.variable_count())
    throw DimensionError("reconstruct_gains: assignment length does not match the program");

  Vector qv(n);
  for (std::size_t i = 0; i < n; ++i) {
    qv[i] = x[layout.q[i]];
    if (!(qv[i] > 0.0))
      throw SynthesisError(SynthesisError::Kind::kInternal, "reconstruct_gains: Q is not positive definite");
  }
  const Matrix lt = read_block(x, layout.l_tilde, n, m);
  const Matrix nt = read_block(x, layout.n_tilde, n, m);
  const Matrix tt = read_block(x, layout.t_tilde, n, n);

  Vector qinv(n);
  for (std::size_t i = 0; i < n; ++i) qinv[i] = 1.0 / qv[i];
  const Matrix q_inv = Matrix::diagonal(qinv);

  ObserverGains g{q_inv * lt, q_inv * tt, q_inv * nt, Matrix::diagonal(qv), x[layout.gamma], "synth"};
  const double resid = reconstruction_residual(g, prob.plant);
  if (resid > 1e-6)
    throw SynthesisError(SynthesisError::Kind::kInternal,
                         "reconstruct_gains: T + NC deviates from I by " + std::to_string(resid));

  DerivedObserverMatrices d = derive_observer_matrices(g, prob.plant);
  const Matrix omega = metzlerize(Matrix::diagonal(qv) * d.Mx);
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += omega(i, j);
    const double limit = layout.structurally_zero_column[j] ? 1e-9 : -1.0 + 1e-6;
    if (col > limit)
      throw SynthesisError(SynthesisError::Kind::kInternal,
                           "reconstruct_gains: stability column " + std::to_string(j) + " sum " + std::to_string(col));
  }
  return {std::move(g), std::move(d)};
}

SynthesisResult synthesize(const SynthesisProblem& prob, const SimplexOptions& opts) {
  SynthesisLp layout = build_lp(prob);
  LpSolution first = solve_lp(layout.lp, opts);
  const double gamma_star = first.x[layout.gamma];

  // Stage two keeps gamma on the optimal face and prefers the largest Q,
  // which keeps L = Q^-1 L~ moderate.
  SynthesisLp tie = layout;
  tie.lp.add_row({{tie.gamma, 1.0}}, Relation::kLessEqual, gamma_star * (1.0 + 1e-7) + 1e-12, "gamma at optimum");
  LinearTerms obj;
  for (std::size_t i = 0; i < tie.n; ++i) {
    const double cap = std::max(prob.q_cap, first.x[tie.q[i]]);
    tie.lp.add_row({{tie.q[i], 1.0}}, Relation::kLessEqual, cap, "Q cap [" + std::to_string(i) + "]");
    obj.emplace_back(tie.q[i], -1.0);
  }
  tie.lp.set_objective(std::move(obj));
  LpSolution second = solve_lp(tie.lp, opts);

  auto [gains, derived] = reconstruct_gains(second.x, tie, prob);
  Vector sums(tie.n, 0.0);
  const Matrix omega = metzlerize(*gains.Q * derived.Mx);
  for (std::size_t j = 0; j < tie.n; ++j)
    for (std::size_t i = 0; i < tie.n; ++i) sums[j] += omega(i, j);
  return {std::move(gains), std::move(derived), std::move(first), std::move(second), std::move(sums)};
}

std::pair<ObserverGains, DerivedObserverMatrices> load_paper_gains(PaperScenario s,
                                                                   const PlantMatrices& p) {
  ObserverGains g = s == PaperScenario::kNoiseFree
                        ? ObserverGains{Matrix{{0.0}, {1.7799}}, Matrix{{1.0, 0.0}, {0.0, -0.0002}},
                                        Matrix{{0.0}, {1.0002}}, std::nullopt, std::nullopt, "noise-free"}
                        : ObserverGains{Matrix{{0.0}, {1.0933}}, Matrix{{1.0, 0.0}, {0.0, 0.6244}},
                                        Matrix{{0.0}, {0.3756}}, std::nullopt, std::nullopt, "noisy"};
  DerivedObserverMatrices d = derive_observer_matrices(g, p);
  return {std::move(g), std::move(d)};
}

PaperScenario parse_paper_scenario(const std::string& name) {
  if (name == "noise-free") return PaperScenario::kNoiseFree;
  if (name == "noisy") return PaperScenario::kNoisy;
  throw ConfigError("unknown scenario '" + name + "' (expected noise-free or noisy)");
}

std::string to_string(PaperScenario s) {
  return s == PaperScenario::kNoiseFree ? "noise-free" : "noisy";
}

double reconstruction_residual(const ObserverGains& g, const PlantMatrices& p) {
  const Matrix r = g.T + g.N * p.C - Matrix::identity(g.T.rows());
  return max_abs(r);
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out += ' ';
      out += buf;
    }
  }
  return out;
}

Matrix parse_matrix(const std::string& text) {
  std::vector<Vector> rows;
  std::stringstream all(text);
  std::string row_text;
  while (std::getline(all, row_text, ';')) {
    std::istringstream rs(row_text);
    Vector row;
    std::string tok;
    while (rs >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw IoError("matrix entry '" + tok + "' is not a number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw IoError("empty matrix '" + text + "'");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw IoError("ragged matrix '" + text + "'");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_gain_file(const std::string& path, const ObserverGains& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open gain file for writing: " + path);
  char buf[40];
  out << "# observer gains; matrices row by row, rows separated by ';'\n";
  out << "scenario-id = " << (g.scenario_id.empty() ? "custom" : g.scenario_id) << '\n';
  out << "L = " << format_matrix(g.L) << '\n';
  out << "T = " << format_matrix(g.T) << '\n';
  out << "N = " << format_matrix(g.N) << '\n';
  out << "Q = " << (g.Q ? format_matrix(*g.Q) : "none") << '\n';
  if (g.gamma) {
    std::snprintf(buf, sizeof buf, "%.17g", *g.gamma);
    out << "gamma = " << buf << '\n';
  } else {
    out << "gamma = none\n";
  }
  if (!out) throw IoError("failed writing gain file: " + path);
}

ObserverGains read_gain_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw IoError("cannot read gain file " + path + ": " + e.message());
  }
  auto get = [&](const char* key) {
    auto v = tree.get_optional<std::string>(key);
    if (!v) throw IoError("gain file " + path + " is missing key '" + key + "'");
    return *v;
  };
  try {
    ObserverGains g{parse_matrix(get("L")), parse_matrix(get("T")), parse_matrix(get("N")),
                    std::nullopt, std::nullopt, tree.get<std::string>("scenario-id", "custom")};
    const std::string q = tree.get<std::string>("Q", "none");
    if (q != "none") g.Q = parse_matrix(q);
    const std::string gamma = tree.get<std::string>("gamma", "none");
    if (gamma != "none") g.gamma = std::stod(gamma);
    if (!g.T.is_square() || g.L.rows() != g.T.rows() || g.N.rows() != g.T.rows())
      throw IoError("gain file " + path + ": inconsistent L/T/N shapes");
    return g;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("gain file " + path + ": " + e.what());
  }
}

}  // namespace cacc
