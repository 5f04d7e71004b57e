#pragma once

#include <vector>

#include "qkdsim/jones.hpp"

namespace qkdsim {

/// One fiber section as seen by the interferometer: a polarization transport
/// plus a scalar common phase. Phases are kept unwrapped.
struct FiberElement {
  JonesMatrix transport{};
  double common_phase = 0.0;   ///< radians
  double nominal_phase = 0.0;  ///< mean the thermal drift relaxes to
  double length_km = 0.0;

  friend bool operator==(const FiberElement&, const FiberElement&) = default;
};

/// Birefringent piece of fiber parameterized as a waveplate. The rest values
/// are the mean the fast disturbance relaxes to.
struct BirefringentSegment {
  double theta = 0.0;
  double delta = 0.0;
  double rest_theta = 0.0;
  double rest_delta = 0.0;
  double length_km = 0.0;

  friend bool operator==(const BirefringentSegment&, const BirefringentSegment&) = default;
};

struct SegmentedFiber {
  std::vector<BirefringentSegment> segments;
  double segment_length_km = 1.0;

  double length_km() const;

  friend bool operator==(const SegmentedFiber&, const SegmentedFiber&) = default;
};

enum class DisturbanceKind { fast_birefringence, slow_thermal_phase };

/// Ornstein-Uhlenbeck disturbance acting on either waveplate parameters or a
/// common phase.
///
/// The two kinds read `diffusion_rate` differently:
///   fast_birefringence  rad^2/s per km; stationary variance D * tau * segment length.
///   slow_thermal_phase  rad^2/s; short-time increment variance D * dt, so the
///                       stationary variance is D * tau / 2.
struct DisturbanceProcess {
  DisturbanceKind kind = DisturbanceKind::fast_birefringence;
  double correlation_time_s = 1.0;
  double diffusion_rate = 0.0;
  double dt_s = 1.0;

  /// Throws std::invalid_argument when tau <= 0, D < 0 or dt <= 0.
  void validate() const;
  double stationary_variance(double length_km) const;
  /// e^{-dt/tau}
  double mixing() const;

  friend bool operator==(const DisturbanceProcess&, const DisturbanceProcess&) = default;
};

/// ceil(length / segment_length) segments with theta ~ U[0, pi) and
/// delta ~ U[0, 2 pi). The last segment carries the remainder length.
SegmentedFiber build_fiber(double length_km, double segment_length_km, Rng& rng);

/// Single lumped segment with fixed rest birefringence (interferometer arms).
SegmentedFiber lumped_fiber(double length_km, double theta, double delta);

/// Ordered product W_{n-1} ... W_1 W_0: segment 0 is traversed first.
JonesMatrix compile_transport(const SegmentedFiber& fiber);

SegmentedFiber step_birefringence(SegmentedFiber fiber, const DisturbanceProcess& process, Rng& rng);

/// Transport is left untouched.
FiberElement step_phase_drift(FiberElement element, const DisturbanceProcess& process, Rng& rng);

}  // namespace qkdsim
