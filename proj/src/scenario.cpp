#include "qkdsim/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdsim {

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw std::invalid_argument(key + ": " + what);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::drift: return "drift";
    case ExperimentKind::fringe: return "fringe";
    case ExperimentKind::visibility_timeseries: return "visibility_timeseries";
    case ExperimentKind::verify_conditions: return "verify_conditions";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::drift, ExperimentKind::fringe, ExperimentKind::visibility_timeseries,
                    ExperimentKind::verify_conditions}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  require(!fiber_length_km.empty(), "experiment.fiber_length_km", "at least one length required");
  for (double l : fiber_length_km) {
    require(std::isfinite(l) && l >= 0.0, "experiment.fiber_length_km", "lengths must be finite and >= 0");
  }
  require(duration_ticks > 0, "experiment.duration_ticks", "must be > 0");
  require(std::isfinite(dt_seconds) && dt_seconds > 0.0, "experiment.dt_seconds", "must be > 0");
  require(!seeds.empty(), "experiment.seeds", "at least one seed required");
  require(sweep_samples >= 16, "experiment.sweep_samples", "must be >= 16");
}

void SystemSpec::validate() const {
  for (double v : {a1.theta, a1.delta, a1.phase, a2.theta, a2.delta, a2.phase, b1.theta, b1.delta, b1.phase,
                   b2.theta, b2.delta, b2.phase, channel_phase, phi_a, phi_b}) {
    require(std::isfinite(v), "system", "angles and phases must be finite");
  }
  require(std::isfinite(arm_length_km) && arm_length_km >= 0.0, "system.arm_length_km", "must be >= 0");
  require(std::isfinite(segment_length_km) && segment_length_km > 0.0, "system.segment_length_km",
          "must be > 0");
  require(std::isfinite(input_power) && input_power > 0.0, "system.input_power", "must be > 0");
  require(std::isfinite(input_state.power()) && input_state.power() > 0.0, "system.input_state",
          "must be a nonzero vector");
}

JonesVector SystemSpec::scaled_input() const {
  return complex{std::sqrt(input_power / input_state.power())} * input_state;
}

SystemSpec smf_arms() {
  SystemSpec s;
  s.a1 = {0.0, 0.0, 0.0};
  s.a2 = {0.39, 0.4, 0.0};
  s.b1 = {0.0, 0.0, 0.0};
  s.b2 = {0.3, 3.0, 0.0};
  return s;
}

SystemSpec pm_arms() { return SystemSpec{}; }

std::optional<SystemSpec> arm_preset(std::string_view name) {
  if (name == "smf") return smf_arms();
  if (name == "pm") return pm_arms();
  return std::nullopt;
}

void DisturbanceSet::validate() const {
  auto check = [](const DisturbanceProcess& p, const std::string& key) {
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("disturbance." + key + ": " + e.what());
    }
  };
  check(channel_birefringence, "channel_birefringence");
  check(arm_birefringence, "arm_birefringence");
  check(channel_phase, "channel_phase");
  check(arm_phase, "arm_phase");
}

DisturbanceSet DisturbanceSet::with_dt(double dt_s) const {
  DisturbanceSet out = *this;
  out.channel_birefringence.dt_s = dt_s;
  out.arm_birefringence.dt_s = dt_s;
  out.channel_phase.dt_s = dt_s;
  out.arm_phase.dt_s = dt_s;
  return out;
}

std::optional<DisturbanceSet> disturbance_preset(std::string_view name, double dt_s) {
  using K = DisturbanceKind;
  if (name == "paper-like") {
    // Channel: 30 min correlation, 0.5 rad stationary spread per 1 km segment.
    // Arms: an hour of correlation and a per-km rate seventy times lower.
    // Phases: three-hour thermal drift with ~1 rad stationary spread per arm.
    return DisturbanceSet{{K::fast_birefringence, 1800.0, 1.4e-4, dt_s},
                          {K::fast_birefringence, 3600.0, 2e-6, dt_s},
                          {K::slow_thermal_phase, 10800.0, 1.8e-4, dt_s},
                          {K::slow_thermal_phase, 10800.0, 1.8e-4, dt_s}};
  }
  if (name == "quiet") {
    return DisturbanceSet{{K::fast_birefringence, 600.0, 0.0, dt_s},
                          {K::fast_birefringence, 3600.0, 0.0, dt_s},
                          {K::slow_thermal_phase, 10800.0, 0.0, dt_s},
                          {K::slow_thermal_phase, 10800.0, 0.0, dt_s}};
  }
  return std::nullopt;
}

void Scenario::validate() const {
  experiment.validate();
  system.validate();
  disturbance.validate();
}

SystemConfig nominal_config(const SystemSpec& system, const JonesMatrix& channel) {
  auto arm = [&](const ArmSpec& a) {
    return FiberElement{waveplate(a.theta, a.delta), a.phase, a.phase, system.arm_length_km};
  };
  SystemConfig cfg;
  cfg.arm_a1 = arm(system.a1);
  cfg.arm_a2 = arm(system.a2);
  cfg.arm_b1 = arm(system.b1);
  cfg.arm_b2 = arm(system.b2);
  cfg.channel = FiberElement{channel, system.channel_phase, system.channel_phase, 0.0};
  cfg.phi_a = system.phi_a;
  cfg.phi_b = system.phi_b;
  cfg.input_state = system.scaled_input();
  return cfg;
}

}  // namespace qkdsim
