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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cacc/errors.hpp"
#include "cacc/sim_harness.hpp"

using namespace cacc;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

ScenarioConfig quiet(const char* name) {
  ScenarioConfig c = make_scenario(name);
  c.attack.kind = AttackKind::kNone;
  c.disturbance = BoundedSignal::constant(0.0);
  c.noise = BoundedSignal::constant(0.0);
  return c;
}

}  // namespace

TEST_SUITE("sim_harness") {

TEST_CASE("rmse") {
  CHECK(compute_rmse(Vector{1, 1}, Vector{0, 0}) == 1.0);
  CHECK(compute_rmse(Vector{0.3, -2}, Vector{0.3, -2}) == 0.0);
  CHECK(compute_rmse(Vector{3, -3}, Vector{0, 0}) == 3.0);
  CHECK_THROWS_AS(compute_rmse(Vector{}, Vector{}), DimensionError);
  CHECK_THROWS_AS(compute_rmse(Vector{1}, Vector{1, 2}), DimensionError);
}

TEST_CASE("named scenarios and validation") {
  const ScenarioConfig a = make_scenario("noise-free");
  CHECK(a.noise.width() == 0.0);
  CHECK(a.attack.step_time == 30.0);
  CHECK(a.attack.magnitude == 0.5);
  CHECK(a.controller.x_d == 5.0);
  CHECK(a.leader0.x - a.follower0.x - a.leader.length == doctest::Approx(a.controller.x_d));
  const ScenarioConfig b = make_scenario("noisy");
  CHECK(b.noise.lower == -0.025);
  CHECK(b.noise.upper == 0.025);
  CHECK(b.velocity_source == VelocitySource::kFramerMidpoint);
  CHECK_THROWS_AS(make_scenario("foggy"), UnknownScenario);

  ScenarioConfig bad = a;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = a;
  bad.t_end = 1e-4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(set_gain_source(bad, "magic"), ConfigError);
  set_gain_source(bad, "file:/tmp/g.ini");
  CHECK(bad.gain_source == GainSource::kFile);
  CHECK(bad.gain_file == "/tmp/g.ini");
}

TEST_CASE("config files") {
  const ScenarioConfig t = load_config(CACC_SOURCE_DIR "/configs/scenario_template.ini");
  CHECK(t.name == "noisy-custom");
  CHECK(t.noise.kind == SignalKind::kUniform);
  CHECK(t.estimator.neurons == 10);
  CHECK(t.framer_pos_halfwidth == 0.5);

  const std::string path = temp_path("cacc_cfg_test.ini");
  write_file(path, "[scenario]\nbase = noise-free\nt_end = 2\n[attack]\nmagnitude = 0.25\n");
  const ScenarioConfig c = load_config(path);
  CHECK(c.t_end == 2.0);
  CHECK(c.attack.magnitude == 0.25);
  CHECK(c.noise.width() == 0.0);

  write_file(path, "[scenario]\ntend = 2\n");
  CHECK_THROWS_AS(load_config(path), ConfigError);
  write_file(path, "[scenario]\nt_end = fast\n");
  CHECK_THROWS_AS(load_config(path), ConfigError);
  write_file(path, "[scenario]\nbase = foggy\n");
  CHECK_THROWS_AS(load_config(path), UnknownScenario);
  write_file(path, "[attack]\nmagnitude = 0.9\n");
  CHECK_THROWS_AS(load_config(path), ConfigError);
  write_file(path, "[scenario\n");
  CHECK_THROWS_AS(load_config(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(temp_path("cacc_missing.ini")), IoError);
}

TEST_CASE("zero dynamics leave the state unchanged") {
  ScenarioConfig c = quiet("noise-free");
  c.leader0 = {0.0, 0.0};
  c.follower0 = {0.0, 0.0};
  c.leader.length = 0.0;
  c.controller.x_d = 0.0;
  c.profile.segments = {{0.0, 0.0}};
  c.framer_pos_halfwidth = c.framer_vel_halfwidth = 0.0;
  c.t_end = 1.0;
  Simulation sim(c);
  const std::vector<double> x0 = sim.state().x;
  while (!sim.done()) sim.step();
  CHECK(sim.state().x == x0);
}

TEST_CASE("leader integration matches the closed-form solution") {
  ScenarioConfig c = quiet("noise-free");
  c.leader0 = {0.0, 3.0};
  c.t_end = 10.0;
  const double a = c.leader.a, b = c.leader.b;
  const double u = c.profile.command(0.0, c.leader);
  Simulation sim(c);
  double max_err = 0.0;
  while (!sim.done()) {
    sim.step();
    const double t = sim.state().t;
    const double v = std::exp(-a * t) * 3.0 + b * u / a * (1.0 - std::exp(-a * t));
    max_err = std::max(max_err, std::abs(sim.state().x[1] - v));
  }
  CHECK(max_err <= 1e-8);
}

TEST_CASE("rk4 step is fourth order") {
  // x' = -x^2 + sin t; the error ratio under step halving approaches 16.
  auto f = [](double t, const std::vector<double>& x, std::vector<double>& dx) { dx[0] = -x[0] * x[0] + std::sin(t); };
  auto solve = [&](double dt) {
    std::vector<double> x{1.0};
    const int n = static_cast<int>(std::lround(2.0 / dt));
    for (int k = 0; k < n; ++k) x = rk4_step(x, k * dt, dt, f);
    return x[0];
  };
  const double a = solve(0.1), b = solve(0.05), c = solve(0.025);
  const double ratio = (a - b) / (b - c);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("nominal tracking without attack, noise or disturbance") {
  ScenarioConfig c = quiet("noise-free");
  c.attack.kind = AttackKind::kStep;
  c.attack.magnitude = 0.0;
  c.follower0.x -= 1.0;  // start 1 m behind the desired spacing
  const RunResult r = run_scenario(c);
  REQUIRE_FALSE(r.abort_reason);
  Vector gap, ref;
  for (const TraceRow& row : r.trace)
    if (row.t >= 50.0) {
      gap.push_back(row.gap);
      ref.push_back(5.0);
    }
  CHECK(compute_rmse(gap, ref) <= 0.05);
  CHECK(std::abs(r.trace.back().f_tilde) < 1e-3);
  CHECK(std::abs(r.trace.back().e) < 1e-3);
}

TEST_CASE("scenario 1 with the resilient law") {
  const ScenarioConfig c = make_scenario("noise-free");
  const RunResult r = run_scenario(c);
  REQUIRE_FALSE(r.abort_reason);
  CHECK(r.trace.size() == c.steps() + 1);
  CHECK(r.metrics.containment_rate == 1.0);
  CHECK_FALSE(r.metrics.collision);
  double pre = 0.0, dip = 1e9;
  for (const TraceRow& row : r.trace) {
    if (row.t < 30.0) pre = row.gap;
    else dip = std::min(dip, row.gap);
  }
  CHECK(dip < pre);
  CHECK(std::abs(r.trace.back().gap - 5.0) < 0.01);
  REQUIRE(r.metrics.settling_time.has_value());
  CHECK(*r.metrics.settling_time <= 10.0);
  CHECK(r.metrics.bounded);
}

TEST_CASE("baseline law carries the analytic steady-state spacing error") {
  // With f_hat = 0 and an exact leader estimate the error dynamics settle at
  // e = b f / (alpha K1 + 1), i.e. the gap shrinks by that amount. The
  // sinusoidal disturbance is removed so the settled value is constant.
  ScenarioConfig c = make_scenario("noise-free");
  c.baseline = true;
  c.disturbance = BoundedSignal::constant(0.0);
  const RunResult r = run_scenario(c);
  const double offset = c.follower.b * 0.5 / (c.controller.alpha * c.controller.k1 + 1.0);
  CHECK(r.trace.back().e == doctest::Approx(offset).epsilon(1e-3));
  // The gap itself also carries the slow drift of the leader position
  // estimate, which sees the attacked input.
  CHECK(std::abs(r.trace.back().gap - (5.0 - offset)) < 0.05);
  CHECK(r.metrics.min_gap < 5.0 - 0.99 * offset);
  for (const TraceRow& row : r.trace) REQUIRE(row.f_hat == 0.0);
}

TEST_CASE("noisy scenario keeps the leader inside its framers") {
  const RunResult r = run_scenario(make_scenario("noisy"));
  REQUIRE_FALSE(r.abort_reason);
  CHECK(r.containment_violations == 0);
  CHECK(r.metrics.containment_rate == 1.0);
  CHECK_FALSE(r.metrics.collision);
  for (const TraceRow& row : r.trace) {
    REQUIRE(row.eps_pos >= 0.0);
    REQUIRE(row.v_hi >= row.v_lo);
    REQUIRE(std::abs(row.x_hat - row.leader_x) <= row.eps_pos / 2 + 1e-9);
  }
}

TEST_CASE("runs are deterministic for a fixed seed") {
  ScenarioConfig c = make_scenario("noisy");
  c.t_end = 5.0;
  const RunResult a = run_scenario(c), b = run_scenario(c);
  std::ostringstream sa, sb;
  write_trace(a.trace, sa);
  write_trace(b.trace, sb);
  CHECK(sa.str() == sb.str());
  c.seed = 2;
  std::ostringstream sc;
  write_trace(run_scenario(c).trace, sc);
  CHECK(sc.str() != sa.str());
}

TEST_CASE("distance RMSE is insensitive to halving the step") {
  ScenarioConfig c = make_scenario("noise-free");
  const double a = run_scenario(c, {false}).metrics.distance_rmse;
  c.dt = 5e-4;
  const double b = run_scenario(c, {false}).metrics.distance_rmse;
  CHECK(std::abs(a - b) < 0.01 * a);
}

TEST_CASE("trace emission and parsing") {
  const std::string path = temp_path("cacc_trace_test.csv");
  emit_trace({}, path);
  CHECK(slurp(path) == std::string(kTraceHeader) + "\n");

  ScenarioConfig c = make_scenario("noisy");
  c.t_end = 0.5;
  const RunResult r = run_scenario(c);
  emit_trace({r.trace.front()}, path);
  const std::string one = slurp(path);
  std::istringstream lines(one);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == kTraceHeader);
  CHECK(std::count(row.begin(), row.end(), ',') == 21);

  emit_trace(r.trace, path);
  const std::string text = slurp(path);
  const Trace back = read_trace(path);
  CHECK(back.size() == r.trace.size());
  std::ostringstream again;
  write_trace(back, again);
  CHECK(again.str() == text);

  const RunMetrics m1 = r.metrics;
  const RunMetrics m2 = compute_metrics(back, MetricsSettings::from(c));
  CHECK(m2.rows == m1.rows);
  CHECK(m2.position_rmse == doctest::Approx(m1.position_rmse).epsilon(1e-6));
  CHECK(m2.min_gap == doctest::Approx(m1.min_gap).epsilon(1e-8));
  CHECK(m2.containment_rate == m1.containment_rate);

  write_file(path, "t,x\n1,2\n");
  CHECK_THROWS_AS(read_trace(path), IoError);
  write_file(path, std::string(kTraceHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trace(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_trace({}, "/nonexistent-dir/trace.csv"), IoError);
}

TEST_CASE("metrics") {
  Trace t(8);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].t = static_cast<double>(i);
    t[i].gap = 5.0 + (i == 3 ? -1.0 : 0.0);
    t[i].contained = i != 2;
    t[i].f_tilde = (i == 4 || i == 5) ? 0.3 : 0.0;
    t[i].eps_pos = 2.0;
  }
  MetricsSettings s;
  s.attack_time = 4.0;
  const RunMetrics m = compute_metrics(t, s);
  CHECK(m.rows == 8);
  CHECK(m.min_gap == 4.0);
  CHECK_FALSE(m.collision);
  CHECK(m.containment_rate == doctest::Approx(7.0 / 8.0));
  CHECK(m.distance_rmse == doctest::Approx(std::sqrt(1.0 / 8.0)));
  CHECK(m.mean_position_width == 2.0);
  REQUIRE(m.settling_time.has_value());
  CHECK(*m.settling_time == 2.0);
  t.back().f_tilde = 1.0;
  CHECK_FALSE(compute_metrics(t, s).settling_time.has_value());
  t[3].gap = 0.0;
  CHECK(compute_metrics(t, s).collision);
}

TEST_CASE("synthesized and file gains drive the simulation") {
  ScenarioConfig c = make_scenario("noisy");
  c.t_end = 40.0;
  c.gain_source = GainSource::kSynthesize;
  const ObserverGains g = resolve_gains(c);
  CHECK(g.gamma.has_value());
  const std::string path = temp_path("cacc_sim_gains.ini");
  write_gain_file(path, g);
  set_gain_source(c, "file:" + path);
  const RunResult r = run_scenario(c);
  std::filesystem::remove(path);
  REQUIRE_FALSE(r.abort_reason);
  CHECK(r.metrics.containment_rate == 1.0);
}

TEST_CASE("a diverging closed loop aborts with the partial trace kept") {
  ScenarioConfig c = make_scenario("noise-free");
  c.controller.k1 = 1e5;  // far beyond the RK4 stability limit at dt = 1 ms
  const RunResult r = run_scenario(c);
  REQUIRE(r.abort_reason.has_value());
  CHECK(r.abort_reason->find("non-finite") != std::string::npos);
  CHECK_FALSE(r.trace.empty());
  CHECK(r.trace.size() < c.steps() + 1);
}

TEST_CASE("svg rendering") {
  ScenarioConfig c = make_scenario("noise-free");
  c.t_end = 1.0;
  const std::string svg = render_svg(run_scenario(c).trace);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK_THROWS_AS(render_svg({}), DimensionError);
}

}  // TEST_SUITE
