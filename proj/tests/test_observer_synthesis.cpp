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

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "cacc/errors.hpp"
#include "cacc/linear_program.hpp"
#include "cacc/observer_synthesis.hpp"

using namespace cacc;

namespace {

// Closed-form eigenvalues of a 2x2 matrix.
std::pair<std::complex<double>, std::complex<double>> eig2(const Matrix& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

SynthesisProblem noisy_problem(double attack_width) {
  SynthesisProblem prob{build_plant_matrices(VehicleParams{}), 0.02, 0.05};
  prob.attack_width = attack_width;
  return prob;
}

}  // namespace

TEST_SUITE("linear_program") {

TEST_CASE("single bound") {
  LinearProgram lp;
  const auto x = lp.add_variable("x");
  lp.add_row({{x, 1.0}}, Relation::kGreaterEqual, 3.0, "x >= 3");
  lp.set_objective({{x, 1.0}});
  const LpSolution s = solve_lp(lp);
  CHECK(s.x[x] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("max of lower bounds") {
  LinearProgram lp;
  const auto g = lp.add_variable("gamma");
  lp.add_row({{g, 1.0}}, Relation::kGreaterEqual, 1.0, "g >= 1");
  lp.add_row({{g, 1.0}}, Relation::kGreaterEqual, 2.0, "g >= 2");
  lp.set_objective({{g, 1.0}});
  CHECK(solve_lp(lp).x[g] == doctest::Approx(2.0));
}

TEST_CASE("free variables, equalities and a textbook optimum") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3  -> (3, 1), objective 11.
  LinearProgram lp;
  const auto x = lp.add_variable("x");
  const auto y = lp.add_variable("y");
  lp.add_row({{x, 1}, {y, 1}}, Relation::kLessEqual, 4, "r1");
  lp.add_row({{x, 1}, {y, 3}}, Relation::kLessEqual, 6, "r2");
  lp.add_row({{x, 1}}, Relation::kLessEqual, 3, "r3");
  lp.set_objective({{x, -3}, {y, -2}});
  const LpSolution s = solve_lp(lp);
  CHECK(s.x[x] == doctest::Approx(3.0));
  CHECK(s.x[y] == doctest::Approx(1.0));

  LinearProgram f;
  const auto z = f.add_variable("z", VariableSign::kFree);
  f.add_row({{z, 1.0}}, Relation::kEqual, -2.5, "z = -2.5");
  f.set_objective({{z, 1.0}});
  CHECK(solve_lp(f).x[z] == doctest::Approx(-2.5));
}

TEST_CASE("infeasible and unbounded are reported distinctly") {
  LinearProgram lp;
  const auto x = lp.add_variable("x");
  lp.add_row({{x, 1.0}}, Relation::kLessEqual, 1.0, "x <= 1");
  lp.add_row({{x, 1.0}}, Relation::kGreaterEqual, 2.0, "x >= 2");
  lp.set_objective({{x, 1.0}});
  try {
    solve_lp(lp);
    FAIL("expected infeasible");
  } catch (const SynthesisError& e) {
    CHECK(e.kind() == SynthesisError::Kind::kInfeasible);
    CHECK_FALSE(e.violated_rows().empty());
  }

  LinearProgram u;
  const auto y = u.add_variable("y", VariableSign::kFree);
  u.set_objective({{y, 1.0}});
  try {
    solve_lp(u);
    FAIL("expected unbounded");
  } catch (const SynthesisError& e) {
    CHECK(e.kind() == SynthesisError::Kind::kUnbounded);
  }
}

TEST_CASE("degenerate program terminates under Bland's rule") {
  // Beale's cycling example.
  LinearProgram lp;
  const auto x1 = lp.add_variable("x1"), x2 = lp.add_variable("x2"), x3 = lp.add_variable("x3"),
             x4 = lp.add_variable("x4");
  lp.add_row({{x1, 0.25}, {x2, -8}, {x3, -1}, {x4, 9}}, Relation::kLessEqual, 0, "a");
  lp.add_row({{x1, 0.5}, {x2, -12}, {x3, -0.5}, {x4, 3}}, Relation::kLessEqual, 0, "b");
  lp.add_row({{x3, 1}}, Relation::kLessEqual, 1, "c");
  lp.set_objective({{x1, -0.75}, {x2, 20}, {x3, -0.5}, {x4, 6}});
  const LpSolution s = solve_lp(lp);
  CHECK(s.objective == doctest::Approx(-1.25));
  CHECK(lp.max_violation(s.x) < 1e-9);
}

}  // TEST_SUITE

TEST_SUITE("observer_synthesis") {

TEST_CASE("tabulated gains") {
  const PlantMatrices p = build_plant_matrices(VehicleParams{});
  const auto [g1, d1] = load_paper_gains(PaperScenario::kNoiseFree, p);
  CHECK(g1.L == Matrix{{0}, {1.7799}});
  CHECK(g1.T == Matrix{{1, 0}, {0, -0.0002}});
  CHECK(g1.N == Matrix{{0}, {1.0002}});
  const auto [g2, d2] = load_paper_gains(PaperScenario::kNoisy, p);
  CHECK(g2.L == Matrix{{0}, {1.0933}});
  CHECK(g2.T == Matrix{{1, 0}, {0, 0.6244}});
  CHECK(g2.N == Matrix{{0}, {0.3756}});
  CHECK(reconstruction_residual(g1, p) <= 2e-4);
  CHECK(reconstruction_residual(g2, p) <= 2e-4);
  CHECK_THROWS_AS(parse_paper_scenario("rainy"), ConfigError);
}

TEST_CASE("derived matrices from the tabulated gains") {
  const PlantMatrices p = build_plant_matrices(VehicleParams{});
  const auto [g1, d1] = load_paper_gains(PaperScenario::kNoiseFree, p);
  CHECK(d1.Mx(0, 0) == 0.0);
  CHECK(d1.Mx(0, 1) == doctest::Approx(1.0));
  CHECK(d1.Mx(1, 0) == 0.0);
  CHECK(d1.Mx(1, 1) == doctest::Approx(-1.7799 + 0.0002 * 0.1413).epsilon(1e-12));
  CHECK(std::abs(d1.Mx(1, 1) - (-1.7799 + 0.0000283)) < 1e-6);
  CHECK(d1.Mx_down == Matrix(2, 2));
  const Matrix tnc1 = g1.T + g1.N * p.C;
  CHECK(tnc1(0, 0) == doctest::Approx(1.0));
  CHECK(tnc1(1, 1) == doctest::Approx(1.0));

  const auto [g2, d2] = load_paper_gains(PaperScenario::kNoisy, p);
  CHECK(d2.Mu(0, 0) == 0.0);
  CHECK(d2.Mu(1, 0) == doctest::Approx(0.6244 * 6.6870).epsilon(1e-12));
  CHECK(d2.Mu(1, 0) == doctest::Approx(4.1754).epsilon(1e-4));
  CHECK(d2.Mx_down == Matrix(2, 2));

  for (const auto* d : {&d1, &d2}) {
    CHECK(d->Mx_up - d->Mx_down == d->Mx);
    CHECK(d->Mv == d->Mx * (d == &d1 ? g1.N : g2.N) + (d == &d1 ? g1.L : g2.L));
  }
}

TEST_CASE("closed-form eigenvalues of the tabulated error matrices") {
  const PlantMatrices p = build_plant_matrices(VehicleParams{});
  const auto [g1, d1] = load_paper_gains(PaperScenario::kNoiseFree, p);
  const auto [l1a, l1b] = eig2(d1.Mx);
  CHECK(std::min(l1a.real(), l1b.real()) == doctest::Approx(-1.7799).epsilon(1e-3));
  CHECK(std::max(l1a.real(), l1b.real()) == doctest::Approx(0.0));
  const auto [g2, d2] = load_paper_gains(PaperScenario::kNoisy, p);
  const auto [l2a, l2b] = eig2(d2.Mx);
  CHECK(std::min(l2a.real(), l2b.real()) == doctest::Approx(-(1.0933 + 0.6244 * 0.1413)).epsilon(1e-9));
}

TEST_CASE("LP structure") {
  const SynthesisLp s = build_lp(noisy_problem(0.0));
  const LinearProgram& lp = s.lp;
  // Every positive/negative part variable is sign-constrained.
  std::size_t parts = 0;
  for (std::size_t i = 0; i < lp.variable_count(); ++i) {
    const std::string& name = lp.variable_name(i);
    if (name.find("^p[") != std::string::npos || name.find("^n[") != std::string::npos) {
      ++parts;
      CHECK(lp.sign(i) == VariableSign::kNonnegative);
    }
  }
  CHECK(parts > 0);
  CHECK(s.structurally_zero_column == std::vector<bool>{true, false});
  CHECK_THROWS_AS(build_lp(SynthesisProblem{PlantMatrices{Matrix(2, 2), Matrix(3, 1), Matrix(2, 1), Matrix(1, 2),
                                                          Matrix(1, 1)},
                                            0.0, 0.0}),
                  DimensionError);
}

TEST_CASE("zero-width noise gives a feasible program with gamma at the margin") {
  SynthesisProblem prob{build_plant_matrices(VehicleParams{}), 0.0, 0.0};
  const SynthesisResult r = synthesize(prob);
  CHECK(*r.gains.gamma <= 1e-5);
  CHECK(*r.gains.gamma >= prob.margin * 0.999);
}

TEST_CASE("synthesized gains satisfy the reconstruction and stability invariants") {
  for (double attack : {0.0, 1.0}) {
    CAPTURE(attack);
    const SynthesisProblem prob = noisy_problem(attack);
    const SynthesisResult r = synthesize(prob);
    const ObserverGains& g = r.gains;
    CHECK(reconstruction_residual(g, prob.plant) <= 1e-6);
    // Q T + Q N C = Q on the LP assignment itself.
    const SynthesisLp layout = build_lp(prob);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const double q = r.stage_two.x[layout.q[i]] * (i == j ? 1.0 : 0.0);
        const double tt = r.stage_two.x[layout.t_tilde[i * 2 + j]];
        const double nc = r.stage_two.x[layout.n_tilde[i]] * prob.plant.C(0, j);
        CHECK(std::abs(tt + nc - q) <= 1e-9);
      }
    CHECK(r.omega_column_sums[0] <= 1e-9);
    CHECK(r.omega_column_sums[1] < -1.0 + 1e-6);
    CHECK(is_metzler(r.derived.Mx_up));
    CHECK(r.derived.Mx_up - r.derived.Mx_down == r.derived.Mx);
    // The unobservable position row is left untouched.
    CHECK(g.T(0, 1) == doctest::Approx(0.0));
    CHECK(g.N(0, 0) == doctest::Approx(0.0));
    // Metzlerized error matrix: zero eigenvalue for position, negative for velocity.
    const auto [la, lb] = eig2(metzlerize(r.derived.Mx));
    CHECK(std::max(la.real(), lb.real()) == doctest::Approx(0.0));
    CHECK(std::min(la.real(), lb.real()) < -0.5);
    CHECK(r.stage_one.objective == doctest::Approx(*g.gamma).epsilon(1e-6));
  }
}

TEST_CASE("gamma certifies the L1 gain of the velocity framer width") {
  // Width of the velocity framer driven by the disturbance and attack
  // channels, integrated directly; the LP bound is 1^T Q eps' <= -eps_v + sum_k gamma.
  const SynthesisProblem prob = noisy_problem(1.0);
  const SynthesisResult r = synthesize(prob);
  const DerivedObserverMatrices& d = r.derived;
  const Matrix mm = metzlerize(d.Mx);
  const double in0 = std::abs(d.Mw(0, 0)) * prob.disturbance_width + std::abs(d.Mu(0, 0)) * prob.attack_width;
  const double in1 = std::abs(d.Mw(1, 0)) * prob.disturbance_width + std::abs(d.Mu(1, 0)) * prob.attack_width;
  double e0 = 0.0, e1 = 0.0, integral = 0.0;
  const double dt = 1e-3, horizon = 60.0;
  for (int k = 0; k < static_cast<int>(horizon / dt); ++k) {
    const double d0 = mm(0, 0) * e0 + mm(0, 1) * e1 + in0;
    const double d1 = mm(1, 0) * e0 + mm(1, 1) * e1 + in1;
    e0 += dt * d0;
    e1 += dt * d1;
    integral += dt * e1;
  }
  const double bound = 2.0 * *r.gains.gamma * horizon;
  CHECK(integral <= bound);
  // The certificate is not vacuous: it is within a factor 10 of the simulated value.
  CHECK(integral >= 0.1 * bound);
}

TEST_CASE("tabulated noisy-scenario gains are one point among many feasible gains") {
  // Exact reproduction of the tabulated gains is not expected; both gain
  // sets satisfy T + N C = I and have a stable velocity mode.
  const SynthesisProblem prob = noisy_problem(0.0);
  const SynthesisResult r = synthesize(prob);
  const auto [g2, d2] = load_paper_gains(PaperScenario::kNoisy, prob.plant);
  CHECK(reconstruction_residual(r.gains, prob.plant) <= 1e-6);
  CHECK(reconstruction_residual(g2, prob.plant) <= 2e-4);
  CHECK(r.derived.Mx(1, 1) < 0.0);
  CHECK(d2.Mx(1, 1) < 0.0);
}

TEST_CASE("gain file round trip") {
  const PlantMatrices p = build_plant_matrices(VehicleParams{});
  const SynthesisResult r = synthesize(noisy_problem(1.0));
  const std::string path = (std::filesystem::temp_directory_path() / "cacc_gain_roundtrip.ini").string();
  write_gain_file(path, r.gains);
  const ObserverGains back = read_gain_file(path);
  CHECK(back.L == r.gains.L);
  CHECK(back.T == r.gains.T);
  CHECK(back.N == r.gains.N);
  REQUIRE(back.Q.has_value());
  CHECK(*back.Q == *r.gains.Q);
  CHECK(*back.gamma == *r.gains.gamma);

  const auto [g1, d1] = load_paper_gains(PaperScenario::kNoiseFree, p);
  write_gain_file(path, g1);
  const ObserverGains b1 = read_gain_file(path);
  CHECK(b1.T == g1.T);
  CHECK_FALSE(b1.Q.has_value());
  CHECK_FALSE(b1.gamma.has_value());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_gain_file("/nonexistent/gains.ini"), IoError);
  CHECK(parse_matrix("1 2; 3 4") == Matrix{{1, 2}, {3, 4}});
  CHECK_THROWS_AS(parse_matrix("1 2; 3"), Error);
}

}  // TEST_SUITE
