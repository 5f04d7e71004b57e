#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "qkdsim/scenario.hpp"

namespace qkdsim {

/// Parse or validation failure. `line` is set for syntax errors, `key` names
/// the offending setting for validation errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::optional<int> line, std::string key);

  const std::optional<int>& line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::optional<int> line_;
  std::string key_;
};

/// Parses an INI-style scenario description:
///
///   [experiment]  kind, fiber_length_km (comma list), duration_ticks,
///                 dt_seconds, disturbance_preset, seeds (comma list),
///                 sweep_samples
///   [system]      arms (smf | pm), a1_theta, a1_delta, a1_phase, ... b2_phase,
///                 arm_length_km, channel_phase, segment_length_km, phi_a,
///                 phi_b, input_state (re_a, im_a, re_b, im_b), input_power
///   [disturbance] <process>_correlation_s and <process>_rate for process in
///                 channel_birefringence, arm_birefringence, channel_phase,
///                 arm_phase
///
/// Every key is optional. The arm preset and the disturbance preset supply
/// defaults that individual keys override. Unknown sections or keys are
/// errors. `default_kind` applies when the file does not name a kind.
Scenario parse_config(const std::string& text,
                      ExperimentKind default_kind = ExperimentKind::verify_conditions);

/// Writes every setting explicitly; parse_config(serialize_config(s)) == s.
std::string serialize_config(const Scenario& scenario);

}  // namespace qkdsim
