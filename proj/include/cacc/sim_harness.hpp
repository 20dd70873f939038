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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cacc/controller.hpp"
#include "cacc/errors.hpp"
#include "cacc/fdi_estimator.hpp"
#include "cacc/interval_observer.hpp"
#include "cacc/observer_synthesis.hpp"
#include "cacc/plant.hpp"

namespace cacc {

enum class GainSource { kPaper, kSynthesize, kFile };

/// What the observer assumes about the leader command it propagates.
enum class ObserverInputMode {
  kAttackBounded,  ///< centre u_bar - f_hat, radius f_bar + |f_hat|
  kReceived,       ///< point u_bar
};

/// Leader velocity used by the controller.
enum class VelocitySource { kMeasurement, kFramerMidpoint };

struct ScenarioConfig {
  std::string name = "noise-free";
  VehicleParams leader;
  VehicleParams follower;
  VehicleState leader0{25.0, 10.0};
  VehicleState follower0{15.5, 10.0};
  SpeedProfile profile;
  AttackSignal attack;
  BoundedSignal disturbance;
  BoundedSignal noise;
  ControllerGains controller;
  InputLimits limits;
  EstimatorSettings estimator;
  GainSource gain_source = GainSource::kPaper;
  PaperScenario paper_gains = PaperScenario::kNoiseFree;
  std::string gain_file;
  ObserverInputMode observer_input = ObserverInputMode::kAttackBounded;
  VelocitySource velocity_source = VelocitySource::kMeasurement;
  double framer_pos_halfwidth = 0.5;
  double framer_vel_halfwidth = 0.1;
  double t_end = 60.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  bool baseline = false;
  /// |f_tilde| level used for the post-attack settling time.
  double settle_threshold = 0.1;
  /// Engineering bound on ||(e, r)|| over the final quarter of the run.
  double er_bound = 1.0;
  /// Absolute slack of the containment test (round-off of degenerate intervals).
  double containment_tol = 1e-9;

  void validate() const;
  std::size_t steps() const;
};

/// Named reference scenarios: "noise-free" and "noisy". Throws UnknownScenario.
ScenarioConfig make_scenario(const std::string& name);

class UnknownScenario : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Loads an INI-style config; `[scenario] base` selects the named scenario
/// the remaining keys override. Unknown sections or keys are rejected.
ScenarioConfig load_config(const std::string& path);
/// Parses "paper", "synth" or "file:<path>" into the config.
void set_gain_source(ScenarioConfig& cfg, const std::string& spec);

/// Gains for the config's source together with the derived matrices.
ObserverGains resolve_gains(const ScenarioConfig& cfg);
ObserverBounds observer_bounds(const ScenarioConfig& cfg);

struct TraceRow {
  double t = 0.0;
  double leader_x = 0.0;
  double leader_v = 0.0;
  double follower_x = 0.0;
  double follower_v = 0.0;
  double y = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double x_hat = 0.0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  double gap = 0.0;
  double e = 0.0;
  double r = 0.0;
  double u_leader = 0.0;
  double u_bar = 0.0;
  double u_follower = 0.0;
  double f = 0.0;
  double f_hat = 0.0;
  double f_tilde = 0.0;
  double eps_pos = 0.0;  ///< x_hi - x_lo
  bool contained = false;
};

using Trace = std::vector<TraceRow>;

struct RunMetrics {
  double position_rmse = 0.0;  ///< x_hat vs leader_x
  double distance_rmse = 0.0;  ///< gap vs x_d
  double min_gap = 0.0;
  double containment_rate = 0.0;
  /// Time after the attack onset at which |f_tilde| last exceeded the settle
  /// threshold; empty without an attack or when the run ended unsettled.
  std::optional<double> settling_time;
  bool collision = false;
  double mean_position_width = 0.0;
  double tail_er_norm = 0.0;  ///< max ||(e, r)|| over the last 25% of the rows
  bool bounded = false;
  std::size_t rows = 0;
};

/// What the metrics need besides the rows themselves.
struct MetricsSettings {
  double x_d = 5.0;
  std::optional<double> attack_time;
  double settle_threshold = 0.1;
  double er_bound = 1.0;

  static MetricsSettings from(const ScenarioConfig& cfg);
};

RunMetrics compute_metrics(const Trace& trace, const MetricsSettings& s);

/// Streaming form of compute_metrics, fed one row at a time.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(MetricsSettings s) : s_(s) {}

  void add(const TraceRow& row);
  RunMetrics finish() const;

 private:
  MetricsSettings s_;
  std::size_t rows_ = 0;
  std::size_t contained_ = 0;
  double sq_pos_ = 0.0;
  double sq_dist_ = 0.0;
  double width_sum_ = 0.0;
  double min_gap_ = 0.0;
  bool exceeded_ = false;
  std::optional<double> settled_since_;
  std::vector<double> er_norms_;
};

/// Closed-loop state integrated as one vector:
/// [x_L, v_L, x_F, v_F, z_lo (n), z_hi (n), W_hat (n_n), V_hat (2 n_n)].
struct SimState {
  double t = 0.0;
  std::vector<double> x;
};

/// Owns one run: samplers, observer model, estimator and the state bundle.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig cfg);
  Simulation(ScenarioConfig cfg, ObserverGains gains);

  const ScenarioConfig& config() const noexcept { return cfg_; }
  const ObserverModel& model() const noexcept { return model_; }
  const SimState& state() const noexcept { return state_; }
  std::size_t step_index() const noexcept { return k_; }
  bool done() const noexcept { return k_ >= n_steps_; }

  /// Samples the step-start signals and fills the trace row for the current state.
  TraceRow observe();
  /// Advances one RK4 step using the signals sampled by the last observe().
  void step();

  double w_norm() const;
  double v_norm() const;

 private:
  struct Held {
    double theta = 0.0;
    double y = 0.0;
    double u_leader = 0.0;
    double f = 0.0;
    double u_bar = 0.0;
    double d_held = 0.0;
    double u_lo = 0.0;
    double u_hi = 0.0;
    double v_hat = 0.0;
  };
  void derivative(double t, const std::vector<double>& s, std::vector<double>& ds) const;
  double control(const TrackingErrors& err, double v_follower, double v_hat, double f_hat) const;
  double disturbance(double t) const;
  void check_finite() const;

  ScenarioConfig cfg_;
  ObserverModel model_;
  SignalSampler noise_;
  SignalSampler dist_sampler_;
  std::size_t n_;
  std::size_t nn_;
  std::size_t n_steps_;
  std::size_t k_ = 0;
  SimState state_;
  Held held_;
  bool observed_ = false;
  bool first_theta_pending_ = true;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// One classic RK4 step of x' = f(t, x) with the stage arithmetic the
/// simulation uses; exposed for integrator checks.
std::vector<double> rk4_step(const std::vector<double>& x, double t, double dt,
                             const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f);

struct RunResult {
  Trace trace;
  RunMetrics metrics;
  double max_w_norm = 0.0;
  double max_v_norm = 0.0;
  std::size_t containment_violations = 0;
  /// Set when the run stopped early (framer violation, non-finite state).
  std::optional<std::string> abort_reason;
};

struct RunOptions {
  bool keep_trace = true;
};

/// Runs to t_end. Failures abort the run but keep the partial trace.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});
RunResult run_scenario(const ScenarioConfig& cfg, const ObserverGains& gains, const RunOptions& opts = {});

double compute_rmse(std::span<const double> series, std::span<const double> reference);

extern const char* const kTraceHeader;

void emit_trace(const Trace& trace, const std::string& path);
void write_trace(const Trace& trace, std::ostream& os);
Trace read_trace(const std::string& path);
Trace parse_trace(std::istream& is);

std::string format_metrics(const RunMetrics& m);

/// Self-contained SVG with gap, position framers and f_hat vs f panels.
std::string render_svg(const Trace& trace);

}  // namespace cacc
