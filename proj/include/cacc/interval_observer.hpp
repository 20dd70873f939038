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

#include <span>

#include "cacc/interval_algebra.hpp"
#include "cacc/observer_synthesis.hpp"

namespace cacc {

/// Known bounds on the leader disturbance d and the radar noise theta.
struct ObserverBounds {
  Vector d_lower;
  Vector d_upper;
  Vector theta_lower;
  Vector theta_upper;

  static ObserverBounds scalar(double d_lo, double d_hi, double th_lo, double th_hi);
};

/// Gains, derived matrices and bounds in the form the framer equations use.
/// Built once per run; the positive/negative parts are cached.
class ObserverModel {
 public:
  ObserverModel(ObserverGains gains, const PlantMatrices& plant, ObserverBounds bounds);

  const ObserverGains& gains() const noexcept { return gains_; }
  const DerivedObserverMatrices& derived() const noexcept { return derived_; }
  const ObserverBounds& bounds() const noexcept { return bounds_; }

  std::size_t state_dim() const noexcept { return derived_.Mx.rows(); }
  std::size_t output_dim() const noexcept { return gains_.N.cols(); }
  std::size_t input_dim() const noexcept { return derived_.Mu.cols(); }

  /// Constant parts of the lower/upper right-hand sides (disturbance and noise terms).
  const Vector& lower_offset() const noexcept { return lower_offset_; }
  const Vector& upper_offset() const noexcept { return upper_offset_; }
  /// Recovery offsets: X_lo = Z_lo + N y + recover_lower, X_hi = Z_hi + N y + recover_upper.
  const Vector& recover_lower() const noexcept { return recover_lower_; }
  const Vector& recover_upper() const noexcept { return recover_upper_; }
  const Matrix& Mu_pos() const noexcept { return mu_pos_; }
  const Matrix& Mu_neg() const noexcept { return mu_neg_; }

 private:
  ObserverGains gains_;
  DerivedObserverMatrices derived_;
  ObserverBounds bounds_;
  Matrix mu_pos_;
  Matrix mu_neg_;
  Vector lower_offset_;
  Vector upper_offset_;
  Vector recover_lower_;
  Vector recover_upper_;
};

/// Auxiliary framers Z_lo <= T X <= Z_hi.
struct FramerState {
  Vector z_lower;
  Vector z_upper;
  Vector y;  ///< last measurement
};

struct FramerOutput {
  IntervalVector state;      ///< [X_lo, X_hi]
  double position_midpoint;  ///< (x_lo + x_hi) / 2, component 0
  Vector width;              ///< X_hi - X_lo
};

/// Interval of the leader command the observer propagates. A point interval
/// reproduces the received-input form of the observer.
struct InputInterval {
  Vector lower;
  Vector upper;

  static InputInterval point(double u) { return {{u}, {u}}; }
};

/// Encloses z(0) = X(0) - N y0 + N V theta0 for every admissible theta0.
FramerState init_framers(const IntervalVector& x0, std::span<const double> y0, const ObserverModel& model);

struct FramerDerivative {
  Vector dz_lower;
  Vector dz_upper;
};

/// Right-hand sides of the coupled lower/upper framer ODEs.
FramerDerivative framer_derivative(const FramerState& fs, std::span<const double> y,
                                   const InputInterval& u, const ObserverModel& model);

/// Allocation-free form used inside the integrator.
void framer_derivative_into(std::span<const double> z_lower, std::span<const double> z_upper,
                            std::span<const double> y, std::span<const double> u_lower,
                            std::span<const double> u_upper, const ObserverModel& model,
                            std::span<double> dz_lower, std::span<double> dz_upper);

/// State interval from the auxiliary framers. Throws FramerViolation when a
/// recovered lower bound exceeds the upper bound.
FramerOutput recover_interval(const FramerState& fs, std::span<const double> y, const ObserverModel& model);

}  // namespace cacc
