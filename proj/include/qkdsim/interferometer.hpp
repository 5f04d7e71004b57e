#pragma once

#include <vector>

#include "qkdsim/fiber.hpp"
#include "qkdsim/jones.hpp"

namespace qkdsim {

/// Double unbalanced Mach-Zehnder topology. Alice's arms A1/A2, Bob's arms
/// B1/B2 and the transmission channel C. The two interfering paths are
///   P1: A1 -> C -> B2 -> PM_B
///   P2: A2 -> PM_A -> C -> B1
/// and every 50/50 coupler is folded into an amplitude factor 1/4 per path.
struct SystemConfig {
  FiberElement arm_a1;
  FiberElement arm_a2;
  FiberElement arm_b1;
  FiberElement arm_b2;
  FiberElement channel;
  double phi_a = 0.0;  ///< PM_A phase, radians
  double phi_b = 0.0;  ///< PM_B phase, radians
  JonesVector input_state{1.0, 0.0};

  double input_power() const { return input_state.power(); }

  /// Throws std::invalid_argument unless all five transports are unitary (1e-9).
  void validate() const;
};

struct PathTransform {
  JonesMatrix matrix;
  double total_phase = 0.0;
};

struct FringeSample {
  double delta_phi = 0.0;  ///< phi_B - phi_A
  double power = 0.0;
};

struct StabilityCheck {
  bool alice_ok = false;
  bool bob_ok = false;
  double alice_distance = 0.0;  ///< ||A1 - A2||_F
  double bob_distance = 0.0;    ///< ||B1 - B2||_F
};

inline constexpr double kDefaultStabilityTolerance = 1e-6;

/// B2 C A1 with phase alpha1 + beta2 + phi + phi_B.
PathTransform path1_transform(const SystemConfig& cfg);
/// B1 C A2 with phase alpha2 + beta1 + phi + phi_A.
PathTransform path2_transform(const SystemConfig& cfg);

/// Phase of path 1 relative to path 2:
/// (alpha1 - alpha2) + (beta2 - beta1) + (phi_B - phi_A).
double differential_phase(const SystemConfig& cfg);

/// E_out = [M1 e^{i Theta1} + M2 e^{i Theta2}] E_in / 4.
JonesVector output_field(const SystemConfig& cfg);

/// Detector D1 power from the expanded form
///   P_in/8 + (1/16) E^dagger [M e^{-i Delta} + M^dagger e^{i Delta}] E
/// with M the interference operator and Delta the differential phase.
double output_power(const SystemConfig& cfg);

/// Complementary port D2: P_in/4 - P_D1.
double complementary_power(const SystemConfig& cfg);

/// A1^dagger C^dagger B2^dagger B1 C A2
JonesMatrix interference_operator(const SystemConfig& cfg);

/// |E^dagger M E| / P_in. Throws std::invalid_argument on zero input power.
double analytic_visibility(const SystemConfig& cfg);

/// Samples the D1 power while phi_B runs over n uniform points in [0, 2 pi).
std::vector<FringeSample> sweep_fringe(const SystemConfig& cfg, int n_samples);

/// Contrast of the sinusoid a + b cos(phi_B + c) fitted to a phi_B sweep.
/// The uniform-grid least-squares fit is exact for this model.
/// Throws std::invalid_argument when n_samples < 16 or the input power is zero.
double sweep_visibility(const SystemConfig& cfg, int n_samples = 16);

/// Compares the arms of each interferometer. Global phase is not factored out.
StabilityCheck check_stability_conditions(const SystemConfig& cfg,
                                          double tol = kDefaultStabilityTolerance);

/// (1 - v) / 2. Throws std::invalid_argument for v outside [0, 1].
double qber_from_visibility(double v);

}  // namespace qkdsim
