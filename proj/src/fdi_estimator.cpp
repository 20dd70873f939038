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

#include "cacc/fdi_estimator.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "cacc/errors.hpp"

namespace cacc {
namespace {

bool is_scaled_identity(const Matrix& m, double& scale) {
  if (!m.is_square()) return false;
  scale = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != (i == j ? scale : 0.0)) return false;
  return true;
}

}  // namespace

void EstimatorSettings::validate() const {
  if (neurons == 0) throw ConfigError("estimator needs at least one neuron");
  if (!(gamma_w > 0.0) || !(gamma_v > 0.0)) throw ConfigError("adaptation gains must be > 0");
  if (!(w_max > 0.0) || !(v_max > 0.0)) throw ConfigError("projection radii must be > 0");
  if (!(init_v_range >= 0.0)) throw ConfigError("init_v_range must be >= 0");
  if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0))
    throw ConfigError("boundary_fraction must lie in (0, 1)");
  // The initial inner weights must start inside the projection ball.
  if (init_v_range * std::sqrt(2.0 * static_cast<double>(neurons)) > v_max * (1.0 - boundary_fraction))
    throw ConfigError("initial inner weights would start outside the projection ball");
}

EstimatorState EstimatorState::make(const EstimatorSettings& s, std::uint64_t seed) {
  s.validate();
  EstimatorState es{Matrix(s.neurons, 1), Matrix(2, s.neurons),
                    s.gamma_w * Matrix::identity(s.neurons), s.gamma_v * Matrix::identity(2),
                    s.w_max, s.v_max, s.boundary_fraction};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-s.init_v_range, s.init_v_range);
  for (double& x : es.V_hat.data()) x = s.init_v_range > 0.0 ? dist(rng) : 0.0;
  return es;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double sigmoid_prime(double z) {
  const double s = sigmoid(z);
  return s * (1.0 - s);
}

double time_to_compact(double t, double t0, double c_f) {
  if (t < t0) throw ConfigError("time_to_compact: t precedes t0");
  if (!(c_f > 0.0)) throw ConfigError("time_to_compact: c_f must be > 0");
  const double s = c_f * (t - t0);
  return s / (s + 1.0);
}

double estimate_attack_flat(std::span<const double> w, std::span<const double> v,
                            const std::array<double, 2>& delta) {
  const std::size_t nn = w.size();
  double f = 0.0;
  for (std::size_t j = 0; j < nn; ++j) f += w[j] * sigmoid(v[j] * delta[0] + v[nn + j] * delta[1]);
  return f;
}

double estimate_attack(const EstimatorState& es, const EstimatorInput& in) {
  return estimate_attack_flat(es.W_hat.data(), es.V_hat.data(), in.delta);
}

void project_in_place(std::span<const double> theta, std::span<double> direction, double radius,
                      double boundary_fraction) {
  double norm2 = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    norm2 += theta[k] * theta[k];
    dot += theta[k] * direction[k];
  }
  const double inner = radius * (1.0 - boundary_fraction);
  const double inner2 = inner * inner;
  if (norm2 <= inner2 || dot <= 0.0) return;
  const double c = (norm2 - inner2) / (radius * radius - inner2);
  const double k = c * dot / norm2;
  for (std::size_t i = 0; i < theta.size(); ++i) direction[i] -= k * theta[i];
}

Matrix project(const Matrix& theta, const Matrix& direction, double radius, double boundary_fraction) {
  if (theta.rows() != direction.rows() || theta.cols() != direction.cols())
    throw DimensionError("project: parameter and direction shapes differ");
  Matrix out = direction;
  project_in_place(theta.data(), out.data(), radius, boundary_fraction);
  return out;
}

void weight_derivative_flat(std::span<const double> w, std::span<const double> v, const EstimatorInput& in,
                            double gamma_w, double gamma_v, double w_max, double v_max,
                            double boundary_fraction, std::span<double> dw, std::span<double> dv) {
  const std::size_t nn = w.size();
  for (std::size_t j = 0; j < nn; ++j) {
    const double z = v[j] * in.delta[0] + v[nn + j] * in.delta[1];
    const double s = sigmoid(z);
    dw[j] = gamma_w * s * in.phi;
    const double g = in.phi * w[j] * s * (1.0 - s);
    dv[j] = gamma_v * g * in.delta[0];
    dv[nn + j] = gamma_v * g * in.delta[1];
  }
  project_in_place(w, dw, w_max, boundary_fraction);
  project_in_place(v, dv, v_max, boundary_fraction);
}

WeightDerivative weight_derivative(const EstimatorState& es, const EstimatorInput& in) {
  const std::size_t nn = es.neurons();
  double gw = 0.0, gv = 0.0;
  WeightDerivative out{Matrix(nn, 1), Matrix(2, nn)};
  if (is_scaled_identity(es.gamma1, gw) && is_scaled_identity(es.gamma2, gv) && es.gamma1.rows() == nn &&
      es.gamma2.rows() == 2) {
    weight_derivative_flat(es.W_hat.data(), es.V_hat.data(), in, gw, gv, es.w_max, es.v_max,
                           es.boundary_fraction, out.dW.data(), out.dV.data());
    return out;
  }
  // General positive-definite gains.
  Matrix sig(nn, 1), sig_prime_w(1, nn);
  for (std::size_t j = 0; j < nn; ++j) {
    const double z = es.V_hat(0, j) * in.delta[0] + es.V_hat(1, j) * in.delta[1];
    sig(j, 0) = sigmoid(z);
    sig_prime_w(0, j) = es.W_hat(j, 0) * sigmoid_prime(z);
  }
  const Matrix delta = Matrix::column(in.delta);
  out.dW = project(es.W_hat, in.phi * (es.gamma1 * sig), es.w_max, es.boundary_fraction);
  out.dV = project(es.V_hat, in.phi * (es.gamma2 * delta * sig_prime_w), es.v_max, es.boundary_fraction);
  return out;
}

double estimation_error(double f_true, double f_hat) { return f_true - f_hat; }

double taylor_linear_term(const EstimatorState& es, const EstimatorInput& in, const Matrix& w_err,
                          const Matrix& v_err) {
  const std::size_t nn = es.neurons();
  if (w_err.rows() != nn || w_err.cols() != 1 || v_err.rows() != 2 || v_err.cols() != nn)
    throw DimensionError("taylor_linear_term: weight error shapes do not match the estimator");
  double out = 0.0;
  for (std::size_t j = 0; j < nn; ++j) {
    const double z = es.V_hat(0, j) * in.delta[0] + es.V_hat(1, j) * in.delta[1];
    const double dz = v_err(0, j) * in.delta[0] + v_err(1, j) * in.delta[1];
    out += w_err(j, 0) * sigmoid(z) + es.W_hat(j, 0) * sigmoid_prime(z) * dz;
  }
  return out;
}

}  // namespace cacc
