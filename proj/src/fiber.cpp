#include "qkdsim/fiber.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qkdsim {

namespace {

double ou_step(double value, double rest, double mixing, double stationary_variance, Rng& rng) {
  const double noise = std::sqrt(stationary_variance * (1.0 - mixing * mixing));
  return rest + mixing * (value - rest) + noise * rng.normal();
}

}  // namespace

double SegmentedFiber::length_km() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length_km;
  return total;
}

void DisturbanceProcess::validate() const {
  if (!(correlation_time_s > 0.0)) {
    throw std::invalid_argument("disturbance correlation_time must be > 0");
  }
  if (!(diffusion_rate >= 0.0)) {
    throw std::invalid_argument("disturbance diffusion_rate must be >= 0");
  }
  if (!(dt_s > 0.0)) {
    throw std::invalid_argument("disturbance dt must be > 0");
  }
}

double DisturbanceProcess::stationary_variance(double length_km) const {
  if (kind == DisturbanceKind::fast_birefringence) {
    return diffusion_rate * correlation_time_s * length_km;
  }
  return 0.5 * diffusion_rate * correlation_time_s;
}

double DisturbanceProcess::mixing() const { return std::exp(-dt_s / correlation_time_s); }

SegmentedFiber build_fiber(double length_km, double segment_length_km, Rng& rng) {
  if (!(length_km >= 0.0)) {
    throw std::invalid_argument("fiber length must be >= 0, got " + std::to_string(length_km));
  }
  if (!(segment_length_km > 0.0)) {
    throw std::invalid_argument("segment length must be > 0");
  }
  SegmentedFiber fiber;
  fiber.segment_length_km = segment_length_km;
  const auto count = static_cast<std::size_t>(std::ceil(length_km / segment_length_km));
  fiber.segments.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    BirefringentSegment s;
    s.theta = s.rest_theta = std::numbers::pi * rng.uniform();
    s.delta = s.rest_delta = 2.0 * std::numbers::pi * rng.uniform();
    s.length_km = std::min(segment_length_km, length_km - static_cast<double>(k) * segment_length_km);
    fiber.segments.push_back(s);
  }
  return fiber;
}

SegmentedFiber lumped_fiber(double length_km, double theta, double delta) {
  if (!(length_km >= 0.0)) {
    throw std::invalid_argument("fiber length must be >= 0");
  }
  SegmentedFiber fiber;
  fiber.segment_length_km = length_km > 0.0 ? length_km : 1.0;
  fiber.segments.push_back({theta, delta, theta, delta, length_km});
  return fiber;
}

JonesMatrix compile_transport(const SegmentedFiber& fiber) {
  JonesMatrix m = JonesMatrix::identity();
  for (const auto& s : fiber.segments) {
    m = waveplate(s.theta, s.delta) * m;
  }
  return m;
}

SegmentedFiber step_birefringence(SegmentedFiber fiber, const DisturbanceProcess& process, Rng& rng) {
  if (process.kind != DisturbanceKind::fast_birefringence) {
    throw std::invalid_argument("step_birefringence needs a fast_birefringence process");
  }
  if (process.diffusion_rate == 0.0) return fiber;
  const double a = process.mixing();
  for (auto& s : fiber.segments) {
    const double var = process.stationary_variance(s.length_km);
    s.theta = ou_step(s.theta, s.rest_theta, a, var, rng);
    s.delta = ou_step(s.delta, s.rest_delta, a, var, rng);
  }
  return fiber;
}

FiberElement step_phase_drift(FiberElement element, const DisturbanceProcess& process, Rng& rng) {
  if (process.kind != DisturbanceKind::slow_thermal_phase) {
    throw std::invalid_argument("step_phase_drift needs a slow_thermal_phase process");
  }
  if (process.diffusion_rate == 0.0) return element;
  element.common_phase = ou_step(element.common_phase, element.nominal_phase, process.mixing(),
                                 process.stationary_variance(element.length_km), rng);
  return element;
}

}  // namespace qkdsim
