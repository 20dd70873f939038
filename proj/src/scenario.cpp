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

#include <cmath>
#include <map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cacc/errors.hpp"
#include "cacc/sim_harness.hpp"

namespace cacc {
namespace {

BoundedSignal default_disturbance() { return BoundedSignal::sinusoid(-0.01, 0.01, 0.01, 1.0); }

AttackSignal default_attack() {
  AttackSignal a;
  a.kind = AttackKind::kStep;
  a.step_time = 30.0;
  a.magnitude = 0.5;
  a.bound = 0.5;
  return a;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("config key '" + key + "': trailing text in '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: '" + text + "'");
  }
  if (used != text.size() || text.front() == '-')
    throw ConfigError("config key '" + key + "': not an unsigned integer: '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

SignalKind to_signal_kind(const std::string& key, const std::string& text) {
  if (text == "constant") return SignalKind::kConstant;
  if (text == "sinusoid") return SignalKind::kSinusoid;
  if (text == "uniform") return SignalKind::kUniform;
  throw ConfigError("config key '" + key + "': unknown signal kind '" + text + "'");
}

AttackKind to_attack_kind(const std::string& key, const std::string& text) {
  if (text == "none") return AttackKind::kNone;
  if (text == "step") return AttackKind::kStep;
  throw ConfigError("config key '" + key + "': unknown attack kind '" + text + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& value)>;

#define CACC_NUM(field) [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.field = to_double(k, v); }

void set_signal(BoundedSignal& s, const std::string& leaf, const std::string& k, const std::string& v) {
  if (leaf == "kind") s.kind = to_signal_kind(k, v);
  else if (leaf == "lower") s.lower = to_double(k, v);
  else if (leaf == "upper") s.upper = to_double(k, v);
  else if (leaf == "value") s.value = to_double(k, v);
  else if (leaf == "amplitude") s.amplitude = to_double(k, v);
  else if (leaf == "frequency") s.frequency = to_double(k, v);
  else if (leaf == "phase") s.phase = to_double(k, v);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    m["scenario.t_end"] = CACC_NUM(t_end);
    m["scenario.dt"] = CACC_NUM(dt);
    m["scenario.seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); };
    m["scenario.baseline"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.baseline = to_bool(k, v);
    };
    m["scenario.gains"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { set_gain_source(c, v); };
    m["scenario.paper_gains"] = [](ScenarioConfig& c, const std::string&, const std::string& v) {
      c.paper_gains = parse_paper_scenario(v);
    };
    m["scenario.observer_input"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "attack-bounded") c.observer_input = ObserverInputMode::kAttackBounded;
      else if (v == "received") c.observer_input = ObserverInputMode::kReceived;
      else throw ConfigError("config key '" + k + "': expected attack-bounded or received");
    };
    m["scenario.velocity_source"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "measurement") c.velocity_source = VelocitySource::kMeasurement;
      else if (v == "framer") c.velocity_source = VelocitySource::kFramerMidpoint;
      else throw ConfigError("config key '" + k + "': expected measurement or framer");
    };
    m["leader.a"] = CACC_NUM(leader.a);
    m["leader.b"] = CACC_NUM(leader.b);
    m["leader.length"] = CACC_NUM(leader.length);
    m["leader.x0"] = CACC_NUM(leader0.x);
    m["leader.v0"] = CACC_NUM(leader0.v);
    m["leader.target_speed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.profile.segments = {{0.0, to_double(k, v)}};
    };
    m["follower.a"] = CACC_NUM(follower.a);
    m["follower.b"] = CACC_NUM(follower.b);
    m["follower.length"] = CACC_NUM(follower.length);
    m["follower.x0"] = CACC_NUM(follower0.x);
    m["follower.v0"] = CACC_NUM(follower0.v);
    m["attack.kind"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.attack.kind = to_attack_kind(k, v);
    };
    m["attack.step_time"] = CACC_NUM(attack.step_time);
    m["attack.magnitude"] = CACC_NUM(attack.magnitude);
    m["attack.bound"] = CACC_NUM(attack.bound);
    for (const char* leaf : {"kind", "lower", "upper", "value", "amplitude", "frequency", "phase"}) {
      const std::string l = leaf;
      m["disturbance." + l] = [l](ScenarioConfig& c, const std::string& k, const std::string& v) {
        set_signal(c.disturbance, l, k, v);
      };
      m["noise." + l] = [l](ScenarioConfig& c, const std::string& k, const std::string& v) {
        set_signal(c.noise, l, k, v);
      };
    }
    m["controller.alpha"] = CACC_NUM(controller.alpha);
    m["controller.k1"] = CACC_NUM(controller.k1);
    m["controller.x_d"] = CACC_NUM(controller.x_d);
    m["controller.u_min"] = CACC_NUM(limits.lower);
    m["controller.u_max"] = CACC_NUM(limits.upper);
    m["estimator.neurons"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.estimator.neurons = static_cast<std::size_t>(to_u64(k, v));
    };
    m["estimator.gamma_w"] = CACC_NUM(estimator.gamma_w);
    m["estimator.gamma_v"] = CACC_NUM(estimator.gamma_v);
    m["estimator.w_max"] = CACC_NUM(estimator.w_max);
    m["estimator.v_max"] = CACC_NUM(estimator.v_max);
    m["estimator.init_v_range"] = CACC_NUM(estimator.init_v_range);
    m["estimator.boundary_fraction"] = CACC_NUM(estimator.boundary_fraction);
    m["framer.position_halfwidth"] = CACC_NUM(framer_pos_halfwidth);
    m["framer.velocity_halfwidth"] = CACC_NUM(framer_vel_halfwidth);
    m["metrics.settle_threshold"] = CACC_NUM(settle_threshold);
    m["metrics.er_bound"] = CACC_NUM(er_bound);
    m["metrics.containment_tol"] = CACC_NUM(containment_tol);
    return m;
  }();
  return table;
}

#undef CACC_NUM

}  // namespace

void ScenarioConfig::validate() const {
  leader.validate();
  follower.validate();
  profile.validate();
  attack.validate();
  disturbance.validate();
  noise.validate();
  controller.validate();
  estimator.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= dt");
  if (!(framer_pos_halfwidth >= 0.0) || !(framer_vel_halfwidth >= 0.0))
    throw ConfigError("initial framer half-widths must be >= 0");
  if (!(settle_threshold > 0.0)) throw ConfigError("settle_threshold must be > 0");
  if (!(er_bound > 0.0)) throw ConfigError("er_bound must be > 0");
  if (!(containment_tol >= 0.0)) throw ConfigError("containment_tol must be >= 0");
  if (gain_source == GainSource::kFile && gain_file.empty()) throw ConfigError("gain source 'file' needs a path");
  if (limits.lower.has_value() != limits.upper.has_value())
    throw ConfigError("controller limits need both u_min and u_max");
}

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

ScenarioConfig make_scenario(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.attack = default_attack();
  c.disturbance = default_disturbance();
  if (name == "noise-free") {
    c.noise = BoundedSignal::constant(0.0);
    c.paper_gains = PaperScenario::kNoiseFree;
    c.velocity_source = VelocitySource::kMeasurement;
  } else if (name == "noisy") {
    c.noise = BoundedSignal::uniform(-0.025, 0.025, 0);
    c.paper_gains = PaperScenario::kNoisy;
    c.velocity_source = VelocitySource::kFramerMidpoint;
  } else {
    throw UnknownScenario("unknown scenario '" + name + "' (expected noise-free or noisy)");
  }
  return c;
}

void set_gain_source(ScenarioConfig& cfg, const std::string& spec) {
  if (spec == "paper") {
    cfg.gain_source = GainSource::kPaper;
  } else if (spec == "synth") {
    cfg.gain_source = GainSource::kSynthesize;
  } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    cfg.gain_source = GainSource::kFile;
    cfg.gain_file = spec.substr(5);
  } else {
    throw ConfigError("gain source must be paper, synth or file:<path>, got '" + spec + "'");
  }
}

ScenarioConfig load_config(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw IoError("cannot read config '" + path + "': " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ScenarioConfig cfg = make_scenario(pt.get<std::string>("scenario.base", "noise-free"));
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(path + ": key '" + section + "' outside any section");
    for (const auto& [leaf, node] : body) {
      const std::string key = section + "." + leaf;
      if (key == "scenario.base") continue;
      if (key == "scenario.name") {
        cfg.name = node.data();
        continue;
      }
      const auto it = setters().find(key);
      if (it == setters().end()) throw ConfigError(path + ": unknown key '" + key + "'");
      it->second(cfg, key, node.data());
    }
  }
  cfg.validate();
  return cfg;
}

ObserverBounds observer_bounds(const ScenarioConfig& cfg) {
  return ObserverBounds::scalar(cfg.disturbance.lower, cfg.disturbance.upper, cfg.noise.lower, cfg.noise.upper);
}

ObserverGains resolve_gains(const ScenarioConfig& cfg) {
  const PlantMatrices plant = build_plant_matrices(cfg.leader);
  switch (cfg.gain_source) {
    case GainSource::kPaper:
      return load_paper_gains(cfg.paper_gains, plant).first;
    case GainSource::kFile:
      return read_gain_file(cfg.gain_file);
    case GainSource::kSynthesize: {
      SynthesisProblem prob{plant, cfg.disturbance.width(), cfg.noise.width()};
      if (cfg.observer_input == ObserverInputMode::kAttackBounded && cfg.attack.kind != AttackKind::kNone)
        prob.attack_width = 2.0 * cfg.attack.bound;
      ObserverGains g = synthesize(prob).gains;
      g.scenario_id = cfg.name;
      return g;
    }
  }
  throw ConfigError("unhandled gain source");
}

MetricsSettings MetricsSettings::from(const ScenarioConfig& cfg) {
  MetricsSettings s;
  s.x_d = cfg.controller.x_d;
  if (cfg.attack.kind == AttackKind::kStep && cfg.attack.magnitude != 0.0) s.attack_time = cfg.attack.step_time;
  s.settle_threshold = cfg.settle_threshold;
  s.er_bound = cfg.er_bound;
  return s;
}

}  // namespace cacc
