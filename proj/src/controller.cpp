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

#include "cacc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cacc/errors.hpp"

namespace cacc {

void ControllerGains::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("controller alpha must be > 0");
  if (!(k1 > 0.0)) throw ConfigError("controller K1 must be > 0");
  if (!std::isfinite(x_d) || !std::isfinite(x_d_dot) || !std::isfinite(x_d_ddot))
    throw ConfigError("desired gap and its derivatives must be finite");
}

double ControllerGains::k1_threshold(double eps0, double eps1, double eps2) {
  if (!(eps0 > 0.0 && eps1 > 0.0 && eps2 > 0.0)) throw ConfigError("k1_threshold: epsilons must be > 0");
  return 0.5 / eps0 + 0.5 / eps1 + 0.5 / eps2;
}

std::vector<std::string> ControllerGains::warnings() const {
  std::vector<std::string> out;
  const double thr = k1_threshold();
  if (!(k1 > thr)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "K1 = %g does not exceed the stability threshold %g", k1, thr);
    out.emplace_back(buf);
  }
  return out;
}

TrackingErrors compute_errors(const VehicleState& follower, double leader_pos_est, double leader_vel_est,
                              const ControllerGains& gains, double D) {
  TrackingErrors t;
  t.e = follower.x - leader_pos_est + D + gains.x_d;
  t.e_dot = follower.v - leader_vel_est + gains.x_d_dot;
  t.r = t.e_dot + gains.alpha * t.e;
  return t;
}

double control_law(const TrackingErrors& err, double v_i, double v_leader_est, double u_bar, double f_hat,
                   const ControllerGains& g, const VehicleParams& self, const VehicleParams& leader) {
  const double b = self.b;
  if (b == 0.0) throw ConfigError("control_law: b must be nonzero");
  return (self.a / b) * v_i - (leader.a / leader.b) * v_leader_est + u_bar - f_hat - g.x_d_ddot / b -
         (g.alpha / b) * err.r + (g.alpha * g.alpha / b) * err.e - err.e / b - (g.k1 / b) * err.r;
}

double baseline_control_law(const TrackingErrors& err, double v_i, double v_leader_est, double u_bar,
                            double /*f_hat*/, const ControllerGains& gains, const VehicleParams& self,
                            const VehicleParams& leader) {
  return control_law(err, v_i, v_leader_est, u_bar, 0.0, gains, self, leader);
}

double InputLimits::apply(double u) const {
  if (!lower || !upper) return u;
  if (*lower > *upper) throw ConfigError("input limits: lower exceeds upper");
  return std::clamp(u, *lower, *upper);
}

}  // namespace cacc
