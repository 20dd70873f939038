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

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cacc/interval_algebra.hpp"

namespace cacc {

/// Longitudinal vehicle model  x' = v,  v' = -a v + b u + d.
struct VehicleParams {
  double a = 0.1413;    ///< drag coefficient [1/s]
  double b = 6.6870;    ///< input gain [m/s^2 per input unit]
  double length = 4.5;  ///< vehicle length D [m]

  void validate() const;
};

struct VehicleState {
  double x = 0.0;  ///< position [m]
  double v = 0.0;  ///< velocity [m/s]
};

struct StateDerivative {
  double dx = 0.0;
  double dv = 0.0;
};

StateDerivative follower_derivative(const VehicleState& s, double u, double d,
                                    const VehicleParams& p);

enum class AttackKind { kNone, kStep, kSamples };

/// False-data-injection signal f(t) added to the transmitted leader command.
struct AttackSignal {
  AttackKind kind = AttackKind::kNone;
  double step_time = 30.0;
  double magnitude = 0.5;
  /// Known bound f_bar with |f(t)| <= f_bar.
  double bound = 0.5;
  /// (time, value) knots for kSamples, linearly interpolated and held at the ends.
  std::vector<std::pair<double, double>> samples;

  double value(double t) const;
  void validate() const;
};

/// u_bar = u + f(t).
double apply_attack(double u_leader, const AttackSignal& attack, double t);

/// Radar velocity measurement y = v + theta.
double leader_output(const VehicleState& s, double theta);

enum class SignalKind { kConstant, kSinusoid, kUniform };

/// Description of a bounded exogenous signal (disturbance or measurement noise).
struct BoundedSignal {
  double lower = 0.0;
  double upper = 0.0;
  SignalKind kind = SignalKind::kConstant;
  double value = 0.0;      ///< kConstant
  double amplitude = 0.0;  ///< kSinusoid, around the interval centre
  double frequency = 1.0;  ///< kSinusoid [rad/s]
  double phase = 0.0;      ///< kSinusoid [rad]
  std::uint64_t seed = 0;  ///< kUniform

  double width() const { return upper - lower; }
  void validate() const;

  static BoundedSignal constant(double v);
  static BoundedSignal sinusoid(double lower, double upper, double amplitude, double frequency);
  static BoundedSignal uniform(double lower, double upper, std::uint64_t seed);
};

/// Stateful sampler for a BoundedSignal; owns the generator state of the
/// uniform kind so a fixed seed and call sequence replays exactly.
class SignalSampler {
 public:
  explicit SignalSampler(BoundedSignal sig);

  double sample(double t);
  const BoundedSignal& signal() const noexcept { return sig_; }

 private:
  BoundedSignal sig_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> dist_;
};

/// State-space form of the leader as seen by the follower:
///   X' = A X + B u + W d,   y = C X + V theta.
struct PlantMatrices {
  Matrix A;
  Matrix B;
  Matrix W;
  Matrix C;
  Matrix V;
};

PlantMatrices build_plant_matrices(const VehicleParams& p);

/// Piecewise-constant leader cruise profile; the nominal command holds the
/// target speed at steady state, u = (a/b) v_target.
struct SpeedProfile {
  /// (start time, target speed) segments, sorted by start time.
  std::vector<std::pair<double, double>> segments{{0.0, 10.0}};

  double target_speed(double t) const;
  double command(double t, const VehicleParams& p) const;
  void validate() const;
};

/// Configuration notes that are allowed but worth surfacing (not errors).
std::vector<std::string> plant_warnings(const VehicleParams& follower,
                                        const VehicleParams& leader);

}  // namespace cacc
