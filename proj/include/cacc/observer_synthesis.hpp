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

#include <optional>
#include <string>
#include <vector>

#include "cacc/interval_algebra.hpp"
#include "cacc/linear_program.hpp"
#include "cacc/plant.hpp"

namespace cacc {

/// Data for the L1-optimal observer-gain linear program.
struct SynthesisProblem {
  PlantMatrices plant;
  double disturbance_width = 0.0;  ///< d_hi - d_lo
  double noise_width = 0.0;        ///< theta_hi - theta_lo
  /// Width of the attack channel seen through B (2 f_bar); 0 drops the channel.
  double attack_width = 0.0;
  /// Margin that turns each strict inequality into a non-strict one.
  double margin = 1e-6;
  /// Upper bound on the diagonal of Q used only by the tie-breaking stage.
  double q_cap = 1.0;

  void validate() const;
};

/// Observer gains. Q and gamma are only present for synthesized gains.
struct ObserverGains {
  Matrix L;
  Matrix T;
  Matrix N;
  std::optional<Matrix> Q;
  std::optional<double> gamma;
  std::string scenario_id;
};

struct DerivedObserverMatrices {
  Matrix Mx;       ///< T A - L C
  Matrix Mx_up;    ///< Mx^d + (Mx^nd)^+
  Matrix Mx_down;  ///< (Mx^nd)^-
  Matrix Mw;       ///< T W
  Matrix Mv;       ///< Mx N + L
  Matrix Mu;       ///< T B
  Matrix NV;       ///< N V
};

DerivedObserverMatrices derive_observer_matrices(const ObserverGains& g, const PlantMatrices& p);

/// Built program plus the variable indices needed to read the solution back.
struct SynthesisLp {
  LinearProgram lp;
  std::size_t gamma = 0;
  std::vector<std::size_t> q;        ///< diag(Q), n entries
  std::vector<std::size_t> l_tilde;  ///< n x m, row-major
  std::vector<std::size_t> n_tilde;  ///< n x m, row-major
  std::vector<std::size_t> t_tilde;  ///< n x n, row-major
  std::vector<std::size_t> omega;    ///< n x n, row-major
  /// Columns of Mx that are identically zero for every gain choice; their
  /// stability row is relaxed to <= 0.
  std::vector<bool> structurally_zero_column;
  std::size_t n = 0;
  std::size_t m = 0;
};

SynthesisLp build_lp(const SynthesisProblem& prob);

struct SynthesisResult {
  ObserverGains gains;
  DerivedObserverMatrices derived;
  LpSolution stage_one;  ///< min gamma
  LpSolution stage_two;  ///< tie-break on the optimal face
  /// Column sums of the Metzlerized Q-scaled error matrix at the solution.
  Vector omega_column_sums;
};

/// Reads (Q, L~, T~, N~) from an LP assignment, rescales by Q^-1 and checks
/// T + N C = I and the stability rows.
std::pair<ObserverGains, DerivedObserverMatrices> reconstruct_gains(const Vector& assignment,
                                                                    const SynthesisLp& layout,
                                                                    const SynthesisProblem& prob);

/// Two-stage solve: min gamma, then maximise trace(Q) at (near) the optimal
/// gamma so the returned vertex does not sit at Q -> 0 with huge gains.
SynthesisResult synthesize(const SynthesisProblem& prob, const SimplexOptions& opts = {});

enum class PaperScenario { kNoiseFree, kNoisy };

/// Tabulated gains for the two reference scenarios.
std::pair<ObserverGains, DerivedObserverMatrices> load_paper_gains(PaperScenario s,
                                                                   const PlantMatrices& p);

PaperScenario parse_paper_scenario(const std::string& name);
std::string to_string(PaperScenario s);

/// max |T + N C - I|.
double reconstruction_residual(const ObserverGains& g, const PlantMatrices& p);

/// Gain file: `key = value` lines with keys L, T, N, Q, gamma, scenario-id.
/// Matrices are written row by row, entries separated by spaces and rows by ';'.
void write_gain_file(const std::string& path, const ObserverGains& g);
ObserverGains read_gain_file(const std::string& path);

/// "a b; c d" <-> Matrix.
std::string format_matrix(const Matrix& m);
Matrix parse_matrix(const std::string& text);

}  // namespace cacc
