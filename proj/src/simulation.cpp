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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include "cacc/errors.hpp"
#include "cacc/sim_harness.hpp"

namespace cacc {
namespace {

constexpr std::size_t kLx = 0, kLv = 1, kFx = 2, kFv = 3, kZ = 4;

// Separate streams for the noise draws and the estimator initialisation.
constexpr std::uint64_t kEstimatorSeedSalt = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kDisturbanceSeedSalt = 0xD1B54A32D192ED03ULL;

BoundedSignal reseeded(BoundedSignal s, std::uint64_t seed) {
  s.seed = seed;
  return s;
}

double frob(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> rk4_step(const std::vector<double>& x, double t, double dt,
                             const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f) {
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);
  f(t, x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Simulation::Simulation(ScenarioConfig cfg) : Simulation(cfg, resolve_gains(cfg)) {}

Simulation::Simulation(ScenarioConfig cfg, ObserverGains gains)
    : cfg_((cfg.validate(), std::move(cfg))),
      model_(std::move(gains), build_plant_matrices(cfg_.leader), observer_bounds(cfg_)),
      noise_(reseeded(cfg_.noise, cfg_.seed)),
      dist_sampler_(reseeded(cfg_.disturbance, cfg_.seed ^ kDisturbanceSeedSalt)),
      n_(model_.state_dim()),
      nn_(cfg_.estimator.neurons),
      n_steps_(cfg_.steps()) {
  if (n_ != 2 || model_.output_dim() != 1 || model_.input_dim() != 1)
    throw DimensionError("simulation expects a 2-state, 1-output, 1-input leader model");
  const std::size_t dim = kZ + 2 * n_ + 3 * nn_;
  state_.x.assign(dim, 0.0);
  state_.x[kLx] = cfg_.leader0.x;
  state_.x[kLv] = cfg_.leader0.v;
  state_.x[kFx] = cfg_.follower0.x;
  state_.x[kFv] = cfg_.follower0.v;

  // Framers bracket the initial state; the first measurement fixes N y0.
  const double th0 = noise_.sample(0.0);
  held_.theta = th0;
  const double y0 = leader_output(cfg_.leader0, th0);
  const IntervalVector x0({cfg_.leader0.x - cfg_.framer_pos_halfwidth, cfg_.leader0.v - cfg_.framer_vel_halfwidth},
                          {cfg_.leader0.x + cfg_.framer_pos_halfwidth, cfg_.leader0.v + cfg_.framer_vel_halfwidth});
  const FramerState fs = init_framers(x0, std::span<const double>(&y0, 1), model_);
  std::copy(fs.z_lower.begin(), fs.z_lower.end(), state_.x.begin() + kZ);
  std::copy(fs.z_upper.begin(), fs.z_upper.end(), state_.x.begin() + static_cast<long>(kZ + n_));

  const EstimatorState es = EstimatorState::make(cfg_.estimator, cfg_.seed ^ kEstimatorSeedSalt);
  const auto w0 = es.W_hat.data();
  const auto v0 = es.V_hat.data();
  std::copy(w0.begin(), w0.end(), state_.x.begin() + static_cast<long>(kZ + 2 * n_));
  std::copy(v0.begin(), v0.end(), state_.x.begin() + static_cast<long>(kZ + 2 * n_ + nn_));

  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(dim, 0.0);
}

double Simulation::disturbance(double t) const {
  const BoundedSignal& s = cfg_.disturbance;
  switch (s.kind) {
    case SignalKind::kConstant:
      return s.value;
    case SignalKind::kSinusoid:
      return std::clamp(0.5 * (s.lower + s.upper) + s.amplitude * std::sin(s.frequency * t + s.phase), s.lower,
                        s.upper);
    case SignalKind::kUniform:
      return held_.d_held;
  }
  return 0.0;
}

double Simulation::control(const TrackingErrors& err, double v_follower, double v_hat, double f_hat) const {
  const double u = cfg_.baseline
                       ? baseline_control_law(err, v_follower, v_hat, held_.u_bar, f_hat, cfg_.controller,
                                              cfg_.follower, cfg_.leader)
                       : control_law(err, v_follower, v_hat, held_.u_bar, f_hat, cfg_.controller, cfg_.follower,
                                     cfg_.leader);
  return cfg_.limits.apply(u);
}

void Simulation::derivative(double t, const std::vector<double>& s, std::vector<double>& ds) const {
  const std::span<const double> zl(s.data() + kZ, n_);
  const std::span<const double> zu(s.data() + kZ + n_, n_);
  const std::span<const double> w(s.data() + kZ + 2 * n_, nn_);
  const std::span<const double> v(s.data() + kZ + 2 * n_ + nn_, 2 * nn_);
  const std::span<const double> y(&held_.y, 1);

  ds[kLx] = s[kLv];
  ds[kLv] = -cfg_.leader.a * s[kLv] + cfg_.leader.b * held_.u_leader + disturbance(t);

  // Position estimate from the stage framers, held measurement.
  const Matrix& N = model_.gains().N;
  const double x_lo = zl[0] + N(0, 0) * held_.y + model_.recover_lower()[0];
  const double x_hi = zu[0] + N(0, 0) * held_.y + model_.recover_upper()[0];
  const VehicleState follower{s[kFx], s[kFv]};
  const TrackingErrors err =
      compute_errors(follower, 0.5 * (x_lo + x_hi), held_.v_hat, cfg_.controller, cfg_.leader.length);
  const EstimatorInput in = EstimatorInput::from_error(cfg_.follower.b, err.r);
  const double f_hat = cfg_.baseline ? 0.0 : estimate_attack_flat(w, v, in.delta);
  const double u = control(err, follower.v, held_.v_hat, f_hat);

  ds[kFx] = follower.v;
  ds[kFv] = -cfg_.follower.a * follower.v + cfg_.follower.b * u;

  const std::span<const double> ulo(&held_.u_lo, 1), uhi(&held_.u_hi, 1);
  framer_derivative_into(zl, zu, y, ulo, uhi, model_, std::span<double>(ds.data() + kZ, n_),
                         std::span<double>(ds.data() + kZ + n_, n_));

  const std::span<double> dw(ds.data() + kZ + 2 * n_, nn_);
  const std::span<double> dv(ds.data() + kZ + 2 * n_ + nn_, 2 * nn_);
  if (cfg_.baseline) {
    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
  } else {
    const EstimatorSettings& e = cfg_.estimator;
    weight_derivative_flat(w, v, in, e.gamma_w, e.gamma_v, e.w_max, e.v_max, e.boundary_fraction, dw, dv);
  }
}

TraceRow Simulation::observe() {
  const double t = state_.t;
  const auto& s = state_.x;

  // Draw once per step; the constructor already drew theta(0) for the
  // framer initialisation.
  if (!observed_) {
    if (!first_theta_pending_) held_.theta = noise_.sample(t);
    first_theta_pending_ = false;
    if (cfg_.disturbance.kind == SignalKind::kUniform) held_.d_held = dist_sampler_.sample(t);
  }
  held_.y = leader_output({s[kLx], s[kLv]}, held_.theta);
  held_.u_leader = cfg_.profile.command(t, cfg_.leader);
  held_.f = cfg_.attack.value(t);
  held_.u_bar = apply_attack(held_.u_leader, cfg_.attack, t);

  FramerState fs{Vector(s.begin() + kZ, s.begin() + static_cast<long>(kZ + n_)),
                 Vector(s.begin() + static_cast<long>(kZ + n_), s.begin() + static_cast<long>(kZ + 2 * n_)),
                 {held_.y}};
  const FramerOutput fo = recover_interval(fs, fs.y, model_);
  const double x_hat = fo.position_midpoint;
  held_.v_hat = cfg_.velocity_source == VelocitySource::kMeasurement
                    ? held_.y
                    : 0.5 * (fo.state.lower[1] + fo.state.upper[1]);

  const VehicleState follower{s[kFx], s[kFv]};
  const TrackingErrors err = compute_errors(follower, x_hat, held_.v_hat, cfg_.controller, cfg_.leader.length);
  const EstimatorInput in = EstimatorInput::from_error(cfg_.follower.b, err.r);
  const std::span<const double> w(s.data() + kZ + 2 * n_, nn_);
  const std::span<const double> v(s.data() + kZ + 2 * n_ + nn_, 2 * nn_);
  const double f_hat = cfg_.baseline ? 0.0 : estimate_attack_flat(w, v, in.delta);
  const double u = control(err, follower.v, held_.v_hat, f_hat);

  if (cfg_.observer_input == ObserverInputMode::kAttackBounded && cfg_.attack.kind != AttackKind::kNone) {
    // |f| <= f_bar gives u in [u_bar - f_bar, u_bar + f_bar], which this
    // interval contains for any centre shift c. Clipping c at f_bar would make
    // f - c one-sided once f_hat settles near f_bar and bias the midpoint.
    const double c = f_hat;
    const double rad = cfg_.attack.bound + std::abs(c);
    held_.u_lo = held_.u_bar - c - rad;
    held_.u_hi = held_.u_bar - c + rad;
  } else {
    held_.u_lo = held_.u_hi = held_.u_bar;
  }
  observed_ = true;

  TraceRow row;
  row.t = t;
  row.leader_x = s[kLx];
  row.leader_v = s[kLv];
  row.follower_x = s[kFx];
  row.follower_v = s[kFv];
  row.y = held_.y;
  row.x_lo = fo.state.lower[0];
  row.x_hi = fo.state.upper[0];
  row.x_hat = x_hat;
  row.v_lo = fo.state.lower[1];
  row.v_hi = fo.state.upper[1];
  row.gap = s[kLx] - s[kFx] - cfg_.leader.length;
  row.e = err.e;
  row.r = err.r;
  row.u_leader = held_.u_leader;
  row.u_bar = held_.u_bar;
  row.u_follower = u;
  row.f = held_.f;
  row.f_hat = f_hat;
  row.f_tilde = estimation_error(held_.f, f_hat);
  row.eps_pos = row.x_hi - row.x_lo;
  const double tol = cfg_.containment_tol;
  row.contained = row.leader_x >= row.x_lo - tol && row.leader_x <= row.x_hi + tol &&
                  row.leader_v >= row.v_lo - tol && row.leader_v <= row.v_hi + tol;
  return row;
}

void Simulation::step() {
  if (done()) throw ConfigError("step past t_end");
  if (!observed_) observe();
  const double t = state_.t;
  const double dt = cfg_.dt;
  auto& x = state_.x;
  const std::size_t n = x.size();
  derivative(t, x, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k1_[i];
  derivative(t + 0.5 * dt, tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * dt * k2_[i];
  derivative(t + 0.5 * dt, tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + dt * k3_[i];
  derivative(t + dt, tmp_, k4_);
  for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  ++k_;
  state_.t = static_cast<double>(k_) * dt;
  observed_ = false;
  check_finite();
}

void Simulation::check_finite() const {
  for (std::size_t i = 0; i < state_.x.size(); ++i) {
    if (!std::isfinite(state_.x[i])) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "non-finite state component %zu at t = %.6f", i, state_.t);
      throw NonFiniteState(buf);
    }
  }
}

double Simulation::w_norm() const { return frob(std::span<const double>(state_.x.data() + kZ + 2 * n_, nn_)); }

double Simulation::v_norm() const {
  return frob(std::span<const double>(state_.x.data() + kZ + 2 * n_ + nn_, 2 * nn_));
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  return run_scenario(cfg, resolve_gains(cfg), opts);
}

RunResult run_scenario(const ScenarioConfig& cfg, const ObserverGains& gains, const RunOptions& opts) {
  RunResult res;
  Simulation sim(cfg, gains);
  MetricsAccumulator acc(MetricsSettings::from(sim.config()));
  if (opts.keep_trace) res.trace.reserve(sim.config().steps() + 1);
  try {
    while (true) {
      const TraceRow row = sim.observe();
      acc.add(row);
      if (!row.contained) ++res.containment_violations;
      res.max_w_norm = std::max(res.max_w_norm, sim.w_norm());
      res.max_v_norm = std::max(res.max_v_norm, sim.v_norm());
      if (opts.keep_trace) res.trace.push_back(row);
      if (sim.done()) break;
      sim.step();
    }
  } catch (const FramerViolation& e) {
    res.abort_reason = std::string("framer violation: ") + e.what();
  } catch (const NonFiniteState& e) {
    res.abort_reason = e.what();
  }
  res.metrics = acc.finish();
  return res;
}

}  // namespace cacc
