#include "qkdsim/interferometer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkdsim {

namespace {

void require_unitary(const FiberElement& e, const char* name) {
  if (!is_unitary(e.transport, 1e-9)) {
    throw std::invalid_argument(std::string("system config: transport of ") + name + " is not unitary");
  }
}

void require_power(const SystemConfig& cfg) {
  if (!(cfg.input_power() > 0.0)) {
    throw std::invalid_argument("visibility undefined for zero input power");
  }
}

}  // namespace

void SystemConfig::validate() const {
  require_unitary(arm_a1, "arm_a1");
  require_unitary(arm_a2, "arm_a2");
  require_unitary(arm_b1, "arm_b1");
  require_unitary(arm_b2, "arm_b2");
  require_unitary(channel, "channel");
}

PathTransform path1_transform(const SystemConfig& cfg) {
  return {cfg.arm_b2.transport * cfg.channel.transport * cfg.arm_a1.transport,
          cfg.arm_a1.common_phase + cfg.arm_b2.common_phase + cfg.channel.common_phase + cfg.phi_b};
}

PathTransform path2_transform(const SystemConfig& cfg) {
  return {cfg.arm_b1.transport * cfg.channel.transport * cfg.arm_a2.transport,
          cfg.arm_a2.common_phase + cfg.arm_b1.common_phase + cfg.channel.common_phase + cfg.phi_a};
}

double differential_phase(const SystemConfig& cfg) {
  const double d_alpha = cfg.arm_a1.common_phase - cfg.arm_a2.common_phase;
  const double d_beta = cfg.arm_b2.common_phase - cfg.arm_b1.common_phase;
  const double d_phi = cfg.phi_b - cfg.phi_a;
  return d_alpha + d_beta + d_phi;
}

JonesVector output_field(const SystemConfig& cfg) {
  const auto p1 = path1_transform(cfg);
  const auto p2 = path2_transform(cfg);
  const JonesVector e = complex{0.25} * cfg.input_state;
  return std::polar(1.0, p1.total_phase) * (p1.matrix * e) +
         std::polar(1.0, p2.total_phase) * (p2.matrix * e);
}

JonesMatrix interference_operator(const SystemConfig& cfg) {
  const JonesMatrix& c = cfg.channel.transport;
  return adjoint(cfg.arm_a1.transport) * adjoint(c) * adjoint(cfg.arm_b2.transport) *
         cfg.arm_b1.transport * c * cfg.arm_a2.transport;
}

double output_power(const SystemConfig& cfg) {
  const JonesMatrix m = interference_operator(cfg);
  const JonesVector& e = cfg.input_state;
  const complex rotor = std::polar(1.0, -differential_phase(cfg));
  const complex cross = inner(e, m * e) * rotor + inner(e, adjoint(m) * e) * std::conj(rotor);
  return cfg.input_power() / 8.0 + cross.real() / 16.0;
}

double complementary_power(const SystemConfig& cfg) { return cfg.input_power() / 4.0 - output_power(cfg); }

double analytic_visibility(const SystemConfig& cfg) {
  require_power(cfg);
  const JonesVector& e = cfg.input_state;
  const double v = std::abs(inner(e, interference_operator(cfg) * e)) / cfg.input_power();
  return std::min(v, 1.0);
}

std::vector<FringeSample> sweep_fringe(const SystemConfig& cfg, int n_samples) {
  std::vector<FringeSample> out;
  out.reserve(static_cast<std::size_t>(std::max(n_samples, 0)));
  SystemConfig probe = cfg;
  for (int k = 0; k < n_samples; ++k) {
    probe.phi_b = 2.0 * std::numbers::pi * k / n_samples;
    out.push_back({probe.phi_b - probe.phi_a, output_field(probe).power()});
  }
  return out;
}

double sweep_visibility(const SystemConfig& cfg, int n_samples) {
  if (n_samples < 16) {
    throw std::invalid_argument("sweep_visibility needs at least 16 samples");
  }
  require_power(cfg);
  double mean = 0.0;
  double cos_sum = 0.0;
  double sin_sum = 0.0;
  SystemConfig probe = cfg;
  for (int k = 0; k < n_samples; ++k) {
    const double phase = 2.0 * std::numbers::pi * k / n_samples;
    probe.phi_b = phase;
    const double p = output_field(probe).power();
    mean += p;
    cos_sum += p * std::cos(phase);
    sin_sum += p * std::sin(phase);
  }
  const double n = static_cast<double>(n_samples);
  mean /= n;
  const double amplitude = 2.0 * std::hypot(cos_sum, sin_sum) / n;
  // P_max = mean + amplitude, P_min = mean - amplitude
  return std::min(amplitude / mean, 1.0);
}

StabilityCheck check_stability_conditions(const SystemConfig& cfg, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("stability tolerance must be > 0");
  }
  StabilityCheck check;
  check.alice_distance = frobenius_distance(cfg.arm_a1.transport, cfg.arm_a2.transport);
  check.bob_distance = frobenius_distance(cfg.arm_b1.transport, cfg.arm_b2.transport);
  check.alice_ok = check.alice_distance <= tol;
  check.bob_ok = check.bob_distance <= tol;
  return check;
}

double qber_from_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1]");
  }
  return 0.5 * (1.0 - v);
}

}  // namespace qkdsim
