#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/fiber.hpp"
#include "qkdsim/interferometer.hpp"
#include "qkdsim/jones.hpp"

namespace qkdsim {

enum class ExperimentKind { drift, fringe, visibility_timeseries, verify_conditions };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::verify_conditions;
  std::vector<double> fiber_length_km{75.0};
  std::uint64_t duration_ticks = 20000;
  double dt_seconds = 1.08;
  std::string disturbance_preset = "paper-like";
  std::vector<std::uint64_t> seeds{1};
  int sweep_samples = 16;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Rest birefringence and nominal common phase of one interferometer arm.
struct ArmSpec {
  double theta = 0.0;
  double delta = 0.0;
  double phase = 0.0;

  friend bool operator==(const ArmSpec&, const ArmSpec&) = default;
};

/// Static description of the optical layout; the channel itself is generated
/// per trial from its length.
struct SystemSpec {
  ArmSpec a1;
  ArmSpec a2;
  ArmSpec b1;
  ArmSpec b2;
  double arm_length_km = 0.002;
  double channel_phase = 0.0;
  double segment_length_km = 1.0;
  double phi_a = 0.0;
  double phi_b = 0.0;
  JonesVector input_state{1.0, 0.0};  ///< polarization; rescaled to input_power
  double input_power = 1.0;

  void validate() const;
  /// input_state normalized to carry input_power.
  JonesVector scaled_input() const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Arms with the rest birefringence of ordinary single-mode fiber, as
/// calibrated for the paper-like scenario.
SystemSpec smf_arms();
/// Polarization-maintaining arms: every arm transport is the identity.
SystemSpec pm_arms();
std::optional<SystemSpec> arm_preset(std::string_view name);

struct DisturbanceSet {
  DisturbanceProcess channel_birefringence{DisturbanceKind::fast_birefringence};
  DisturbanceProcess arm_birefringence{DisturbanceKind::fast_birefringence};
  DisturbanceProcess channel_phase{DisturbanceKind::slow_thermal_phase};
  DisturbanceProcess arm_phase{DisturbanceKind::slow_thermal_phase};

  void validate() const;
  DisturbanceSet with_dt(double dt_s) const;

  friend bool operator==(const DisturbanceSet&, const DisturbanceSet&) = default;
};

/// Named disturbance presets: "paper-like" (calibrated) and "quiet" (all
/// diffusion rates zero). Returns nullopt for unknown names.
std::optional<DisturbanceSet> disturbance_preset(std::string_view name, double dt_s);

struct Scenario {
  ExperimentSpec experiment;
  SystemSpec system = smf_arms();
  DisturbanceSet disturbance = *disturbance_preset("paper-like", ExperimentSpec{}.dt_seconds);

  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Interferometer state built from the rest values of `system` around the
/// given channel transport.
SystemConfig nominal_config(const SystemSpec& system, const JonesMatrix& channel = JonesMatrix::identity());

}  // namespace qkdsim
