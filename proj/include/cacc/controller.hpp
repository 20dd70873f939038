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

#include "cacc/plant.hpp"

namespace cacc {

struct ControllerGains {
  double alpha = 1.0;
  double k1 = 2.0;
  double x_d = 5.0;  ///< desired bumper-to-bumper gap [m]
  double x_d_dot = 0.0;
  double x_d_ddot = 0.0;

  void validate() const;
  /// Lower bound on K1 from the stability argument, 1/(2 eps0) + 1/(2 eps1) + 1/(2 eps2).
  static double k1_threshold(double eps0 = 1.0, double eps1 = 1.0, double eps2 = 1.0);
  std::vector<std::string> warnings() const;
};

struct TrackingErrors {
  double e = 0.0;
  double e_dot = 0.0;
  double r = 0.0;
};

/// e = x_i - x_hat + D + x_d,  e' = v_i - v_hat + x_d',  r = e' + alpha e.
TrackingErrors compute_errors(const VehicleState& follower, double leader_pos_est, double leader_vel_est,
                              const ControllerGains& gains, double D);

/// Resilient law. `leader` supplies (a, b) of the preceding vehicle.
double control_law(const TrackingErrors& err, double v_i, double v_leader_est, double u_bar, double f_hat,
                   const ControllerGains& gains, const VehicleParams& self, const VehicleParams& leader);

/// Same law with the attack estimate forced to zero.
double baseline_control_law(const TrackingErrors& err, double v_i, double v_leader_est, double u_bar,
                            double f_hat, const ControllerGains& gains, const VehicleParams& self,
                            const VehicleParams& leader);

/// Optional actuator clamp; disabled unless both limits are set.
struct InputLimits {
  std::optional<double> lower;
  std::optional<double> upper;

  double apply(double u) const;
};

}  // namespace cacc
