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

#include "cacc/plant.hpp"

#include <algorithm>
#include <cmath>

#include "cacc/errors.hpp"

namespace cacc {

void VehicleParams::validate() const {
  if (!(a > 0.0)) throw ConfigError("vehicle drag a must be > 0");
  if (!(b > 0.0)) throw ConfigError("vehicle input gain b must be > 0");
  if (!(length >= 0.0)) throw ConfigError("vehicle length must be >= 0");
}

StateDerivative follower_derivative(const VehicleState& s, double u, double d,
                                    const VehicleParams& p) {
  return {s.v, -p.a * s.v + p.b * u + d};
}

double AttackSignal::value(double t) const {
  switch (kind) {
    case AttackKind::kNone:
      return 0.0;
    case AttackKind::kStep:
      return t < step_time ? 0.0 : magnitude;
    case AttackKind::kSamples: {
      if (samples.empty()) return 0.0;
      if (t <= samples.front().first) return samples.front().second;
      if (t >= samples.back().first) return samples.back().second;
      auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                                 [](double tt, const auto& s) { return tt < s.first; });
      auto lo = std::prev(hi);
      const double span = hi->first - lo->first;
      const double w = span > 0.0 ? (t - lo->first) / span : 1.0;
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

void AttackSignal::validate() const {
  if (!(bound >= 0.0)) throw ConfigError("attack bound must be >= 0");
  switch (kind) {
    case AttackKind::kNone:
      break;
    case AttackKind::kStep:
      if (std::abs(magnitude) > bound)
        throw ConfigError("attack step magnitude exceeds the declared bound");
      break;
    case AttackKind::kSamples:
      if (!std::is_sorted(samples.begin(), samples.end(),
                          [](const auto& l, const auto& r) { return l.first < r.first; }))
        throw ConfigError("attack samples must be sorted by time");
      for (const auto& [t, f] : samples)
        if (std::abs(f) > bound) throw ConfigError("attack sample exceeds the declared bound");
      break;
  }
}

double apply_attack(double u_leader, const AttackSignal& attack, double t) {
  return u_leader + attack.value(t);
}

double leader_output(const VehicleState& s, double theta) { return s.v + theta; }

void BoundedSignal::validate() const {
  if (!(lower <= upper)) throw ConfigError("signal lower bound exceeds upper bound");
  switch (kind) {
    case SignalKind::kConstant:
      if (value < lower || value > upper) throw ConfigError("constant signal outside its bounds");
      break;
    case SignalKind::kSinusoid: {
      const double half = 0.5 * (upper - lower);
      if (!(amplitude >= 0.0) || amplitude > half * (1.0 + 1e-12))
        throw ConfigError("sinusoid amplitude exceeds the half-width of its bounds");
      break;
    }
    case SignalKind::kUniform:
      break;
  }
}

BoundedSignal BoundedSignal::constant(double v) {
  BoundedSignal s;
  s.lower = s.upper = s.value = v;
  return s;
}

BoundedSignal BoundedSignal::sinusoid(double lower, double upper, double amplitude,
                                      double frequency) {
  BoundedSignal s;
  s.kind = SignalKind::kSinusoid;
  s.lower = lower;
  s.upper = upper;
  s.amplitude = amplitude;
  s.frequency = frequency;
  return s;
}

BoundedSignal BoundedSignal::uniform(double lower, double upper, std::uint64_t seed) {
  BoundedSignal s;
  s.kind = SignalKind::kUniform;
  s.lower = lower;
  s.upper = upper;
  s.seed = seed;
  return s;
}

SignalSampler::SignalSampler(BoundedSignal sig)
    : sig_(std::move(sig)), rng_(sig_.seed), dist_(sig_.lower, sig_.upper) {
  sig_.validate();
}

double SignalSampler::sample(double t) {
  switch (sig_.kind) {
    case SignalKind::kConstant:
      return sig_.value;
    case SignalKind::kSinusoid: {
      const double centre = 0.5 * (sig_.lower + sig_.upper);
      const double v = centre + sig_.amplitude * std::sin(sig_.frequency * t + sig_.phase);
      return std::clamp(v, sig_.lower, sig_.upper);
    }
    case SignalKind::kUniform:
      if (sig_.lower == sig_.upper) return sig_.lower;
      return std::clamp(dist_(rng_), sig_.lower, sig_.upper);
  }
  return 0.0;
}

PlantMatrices build_plant_matrices(const VehicleParams& p) {
  return {
      Matrix{{0.0, 1.0}, {0.0, -p.a}},
      Matrix{{0.0}, {p.b}},
      Matrix{{0.0}, {1.0}},
      Matrix{{0.0, 1.0}},
      Matrix{{1.0}},
  };
}

double SpeedProfile::target_speed(double t) const {
  double v = segments.empty() ? 0.0 : segments.front().second;
  for (const auto& [start, speed] : segments) {
    if (t < start) break;
    v = speed;
  }
  return v;
}

double SpeedProfile::command(double t, const VehicleParams& p) const {
  return p.a / p.b * target_speed(t);
}

void SpeedProfile::validate() const {
  if (segments.empty()) throw ConfigError("speed profile needs at least one segment");
  if (!std::is_sorted(segments.begin(), segments.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; }))
    throw ConfigError("speed profile segments must be sorted by start time");
}

std::vector<std::string> plant_warnings(const VehicleParams& follower,
                                        const VehicleParams& leader) {
  std::vector<std::string> out;
  if (follower.a != leader.a || follower.b != leader.b) {
    out.emplace_back("leader and follower (a, b) differ; the controller assumes a homogeneous string");
  }
  return out;
}

}  // namespace cacc
