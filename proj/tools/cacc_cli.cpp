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

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cacc/errors.hpp"
#include "cacc/observer_synthesis.hpp"
#include "cacc/sim_harness.hpp"

namespace {

using namespace cacc;

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kUnknownScenario = 3,
  kBadConfig = 4,
  kIo = 5,
  kSynthesis = 6,
  kAborted = 7,
  kCheckFailed = 8,
  kInternal = 9,
};

constexpr const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  2  bad command line\n"
    "  3  unknown scenario name\n"
    "  4  malformed or invalid configuration\n"
    "  5  missing file or I/O failure\n"
    "  6  gain synthesis failed\n"
    "  7  simulation aborted (framer violation or non-finite state)\n"
    "  8  verify-gains: identity check failed\n"
    "  9  internal error\n";

struct ScenarioOptions {
  std::string scenario = "noise-free";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string gains;
  bool baseline = false;
};

void add_scenario_options(CLI::App* app, ScenarioOptions& o, bool run_flags) {
  app->add_option("--scenario", o.scenario, "named scenario: noise-free or noisy")->capture_default_str();
  app->add_option("--config", o.config, "INI scenario file (overrides --scenario)");
  if (!run_flags) return;
  app->add_option("--seed", o.seed, "noise seed");
  app->add_option("--dt", o.dt, "integration step [s]");
  app->add_option("--t-end", o.t_end, "horizon [s]");
  app->add_option("--gains", o.gains, "observer gains: paper, synth or file:<path>");
  app->add_flag("--baseline", o.baseline, "disable attack compensation (f_hat = 0)");
}

ScenarioConfig build_config(const ScenarioOptions& o) {
  ScenarioConfig cfg = o.config.empty() ? make_scenario(o.scenario) : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.dt) cfg.dt = *o.dt;
  if (o.t_end) cfg.t_end = *o.t_end;
  if (!o.gains.empty()) set_gain_source(cfg, o.gains);
  if (o.baseline) cfg.baseline = true;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw IoError("write to '" + path + "' failed");
}

int cmd_run(const ScenarioOptions& o, const std::string& out, const std::string& svg) {
  const ScenarioConfig cfg = build_config(o);
  for (const std::string& w : cfg.controller.warnings()) std::cerr << "warning: " << w << "\n";
  for (const std::string& w : plant_warnings(cfg.follower, cfg.leader)) std::cerr << "warning: " << w << "\n";
  const RunResult r = run_scenario(cfg, {!out.empty() || !svg.empty()});
  if (!out.empty()) emit_trace(r.trace, out);
  if (!svg.empty() && !r.trace.empty()) write_text(svg, render_svg(r.trace));
  std::cout << "scenario              " << cfg.name << (cfg.baseline ? " (baseline)" : "") << "\n"
            << format_metrics(r.metrics);
  if (r.abort_reason) {
    std::cerr << "run aborted: " << *r.abort_reason << "\n";
    return kAborted;
  }
  return kOk;
}

int cmd_synthesize(const ScenarioOptions& o, const std::string& out) {
  ScenarioConfig cfg = build_config(o);
  cfg.gain_source = GainSource::kSynthesize;
  const ObserverGains g = resolve_gains(cfg);
  write_gain_file(out, g);
  std::printf("gamma = %.9g\nL = %s\nT = %s\nN = %s\nwritten to %s\n", g.gamma.value_or(NAN),
              format_matrix(g.L).c_str(), format_matrix(g.T).c_str(), format_matrix(g.N).c_str(), out.c_str());
  return kOk;
}

int cmd_verify(const std::string& scenario, const std::string& gain_file, double tol) {
  const PlantMatrices p = build_plant_matrices(VehicleParams{});
  const ObserverGains g =
      gain_file.empty() ? load_paper_gains(parse_paper_scenario(scenario), p).first : read_gain_file(gain_file);
  const DerivedObserverMatrices d = derive_observer_matrices(g, p);
  const double residual = reconstruction_residual(g, p);
  double down = 0.0;
  for (double v : d.Mx_down.data()) down = std::max(down, std::abs(v));
  std::printf("gains                 %s\n", g.scenario_id.c_str());
  std::printf("max |T + N C - I|     %.3g\n", residual);
  std::printf("max |Mx_down|         %.3g\n", down);
  std::printf("Mx                    %s\n", format_matrix(d.Mx).c_str());
  const bool ok = residual <= tol && down == 0.0;
  std::printf("%s\n", ok ? "OK" : "FAILED");
  return ok ? kOk : kCheckFailed;
}

int cmd_metrics(const std::string& trace_path, const ScenarioOptions& o) {
  const Trace tr = read_trace(trace_path);
  std::cout << format_metrics(compute_metrics(tr, MetricsSettings::from(build_config(o))));
  return kOk;
}

int cmd_plot(const std::string& trace_path, const std::string& out) {
  const Trace tr = read_trace(trace_path);
  if (tr.empty()) throw IoError("trace '" + trace_path + "' has no rows");
  write_text(out, render_svg(tr));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient CACC simulator: interval observer, neural attack estimator and controller"};
  app.footer(kExitHelp);
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  std::string run_out, run_svg;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario and print its metrics");
  add_scenario_options(run, run_opts, true);
  run->add_option("--out", run_out, "trace CSV path");
  run->add_option("--svg", run_svg, "also write an SVG plot");

  ScenarioOptions syn_opts;
  std::string syn_out = "gains.txt";
  CLI::App* syn = app.add_subcommand("synthesize", "solve the observer-gain LP and write a gain file");
  add_scenario_options(syn, syn_opts, false);
  syn->add_option("--out", syn_out, "gain file path")->capture_default_str();

  std::string ver_scenario = "noise-free", ver_file;
  double ver_tol = 1e-6;
  CLI::App* ver = app.add_subcommand("verify-gains", "check T + N C = I and the Metzler split for a gain set");
  ver->add_option("--scenario", ver_scenario, "tabulated gain set: noise-free or noisy")->capture_default_str();
  ver->add_option("--gains", ver_file, "gain file to check instead of a tabulated set");
  ver->add_option("--tol", ver_tol, "residual tolerance")->capture_default_str();

  ScenarioOptions met_opts;
  std::string met_trace;
  CLI::App* met = app.add_subcommand("metrics", "recompute run metrics from a trace CSV");
  met->add_option("trace", met_trace, "trace CSV")->required();
  add_scenario_options(met, met_opts, false);

  std::string plot_trace, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "render a trace CSV as SVG");
  plot->add_option("trace", plot_trace, "trace CSV")->required();
  plot->add_option("--out", plot_out, "SVG path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, run_out, run_svg);
    if (*syn) return cmd_synthesize(syn_opts, syn_out);
    if (*ver) return cmd_verify(ver_scenario, ver_file, ver_tol);
    if (*met) return cmd_metrics(met_trace, met_opts);
    if (*plot) return cmd_plot(plot_trace, plot_out);
  } catch (const UnknownScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknownScenario;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SynthesisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSynthesis;
  } catch (const FramerViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAborted;
  } catch (const NonFiniteState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAborted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
