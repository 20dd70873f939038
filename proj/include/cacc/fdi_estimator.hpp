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

#include <array>
#include <cstdint>
#include <span>

#include "cacc/interval_algebra.hpp"

namespace cacc {

struct EstimatorSettings {
  std::size_t neurons = 10;
  double gamma_w = 10.0;  ///< Gamma_1 = gamma_w I
  double gamma_v = 10.0;  ///< Gamma_2 = gamma_v I
  double w_max = 20.0;    ///< Frobenius radius for W_hat
  double v_max = 20.0;    ///< Frobenius radius for V_hat
  double init_v_range = 0.1;
  double boundary_fraction = 0.01;

  void validate() const;
};

/// Two-layer estimator f_hat = W^T sigma(V^T delta) with delta = [1, phi]^T.
/// W is n_n x 1, V is 2 x n_n.
struct EstimatorState {
  Matrix W_hat;
  Matrix V_hat;
  Matrix gamma1;  ///< n_n x n_n
  Matrix gamma2;  ///< 2 x 2
  double w_max;
  double v_max;
  double boundary_fraction;

  std::size_t neurons() const noexcept { return W_hat.rows(); }

  /// W_hat = 0, V_hat uniform in [-init_v_range, init_v_range] from `seed`.
  static EstimatorState make(const EstimatorSettings& s, std::uint64_t seed);
};

struct EstimatorInput {
  double phi;                   ///< b r
  std::array<double, 2> delta;  ///< [1, phi]

  static EstimatorInput from_error(double b, double r) { return {b * r, {1.0, b * r}}; }
};

double sigmoid(double z);
/// sigma'(z) = sigma(z) (1 - sigma(z)).
double sigmoid_prime(double z);

/// c_f (t - t0) / (c_f (t - t0) + 1), mapping [t0, inf) onto [0, 1).
double time_to_compact(double t, double t0, double c_f);

double estimate_attack(const EstimatorState& es, const EstimatorInput& in);

struct WeightDerivative {
  Matrix dW;
  Matrix dV;
};

/// Projected adaptation laws
///   W' = proj(Gamma1 sigma(V^T delta) phi),  V' = proj(Gamma2 phi delta W^T sigma'(V^T delta)).
WeightDerivative weight_derivative(const EstimatorState& es, const EstimatorInput& in);

/// Smooth radial projection of `direction` for a parameter confined to the
/// Frobenius ball of `radius`. Identity inside the ball's inner layer or when
/// the direction points inward; the outward radial part is removed
/// progressively across a layer of width `boundary_fraction * radius` and
/// reversed beyond the radius.
Matrix project(const Matrix& theta, const Matrix& direction, double radius, double boundary_fraction);
void project_in_place(std::span<const double> theta, std::span<double> direction, double radius,
                      double boundary_fraction);

/// f - f_hat.
double estimation_error(double f_true, double f_hat);

/// First-order part of f_ideal - f_hat for ideal weights (W_hat + W_err, V_hat + V_err):
///   W_err^T sigma(V_hat^T delta) + W_hat^T sigma'(V_hat^T delta) V_err^T delta.
double taylor_linear_term(const EstimatorState& es, const EstimatorInput& in, const Matrix& w_err,
                          const Matrix& v_err);

/// Span kernels over flat weights (W: n_n, V: 2 x n_n row-major) for the integrator.
double estimate_attack_flat(std::span<const double> w, std::span<const double> v, const std::array<double, 2>& delta);
void weight_derivative_flat(std::span<const double> w, std::span<const double> v, const EstimatorInput& in,
                            double gamma_w, double gamma_v, double w_max, double v_max,
                            double boundary_fraction, std::span<double> dw, std::span<double> dv);

}  // namespace cacc
