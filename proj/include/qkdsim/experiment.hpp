#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qkdsim/fiber.hpp"
#include "qkdsim/interferometer.hpp"
#include "qkdsim/scenario.hpp"

namespace qkdsim {

struct SeriesPoint {
  std::uint64_t tick = 0;
  double time_seconds = 0.0;
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct TimeSeries {
  std::string label;
  std::vector<SeriesPoint> points;

  std::vector<double> values() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

struct SeriesSummary {
  std::string label;
  double fiber_length_km = 0.0;
  std::uint64_t seed = 0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  double std_dev = 0.0;
  double decorrelation_s = 0.0;  ///< infinity when never decorrelated

  /// 1 / decorrelation time, zero when the series never decorrelates.
  double fluctuation_rate() const;
};

struct RunOutput {
  std::vector<TimeSeries> series;
  std::vector<SeriesSummary> summaries;
  double max_unitarity_error = 0.0;  ///< over every compiled transport of the run
};

/// The five fiber sections of one trial evolving under a disturbance set.
/// Owns its generator; one instance per (seed, length) trial.
class DisturbedSystem {
 public:
  DisturbedSystem(const SystemSpec& system, const DisturbanceSet& disturbance, double channel_length_km,
                  Rng rng);
  DisturbedSystem(const DisturbedSystem&) = delete;
  DisturbedSystem& operator=(const DisturbedSystem&) = delete;

  void step_birefringence();
  void step_phases();

  const SystemConfig& config() const { return config_; }
  const SegmentedFiber& channel_fiber() const { return sections_[4].fiber; }
  double max_unitarity_error() const { return max_unitarity_error_; }

 private:
  struct Section {
    SegmentedFiber fiber;
    FiberElement element;
    const DisturbanceProcess* birefringence = nullptr;
    const DisturbanceProcess* phase = nullptr;
  };

  void recompile();

  DisturbanceSet disturbance_;
  Section sections_[5];  // a1, a2, b1, b2, channel
  SystemConfig config_;
  Rng rng_;
  double max_unitarity_error_ = 0.0;
};

/// Generator for the trial (seed, channel length); independent of the order
/// lengths are listed in.
Rng trial_rng(std::uint64_t seed, double channel_length_km);

std::string trial_label(const std::string& prefix, double fiber_length_km, std::uint64_t seed);

struct DriftOptions {
  /// Extra phase added to alpha1 as a function of simulated time.
  std::function<double(double)> scripted_alpha1;
};

/// Detector powers with both modulators at zero; only the thermal phase
/// processes are stepped. Series "d1_*" and "d2_*" per (length, seed).
RunOutput run_drift(const Scenario& scenario, const DriftOptions& options = {});

/// One saw-tooth sweep of phi_B per tick with the birefringence stepped
/// between sweeps. Series "fringe_*" hold the raw samples, "envelope_*" the
/// per-sweep visibility.
RunOutput run_fringe(const Scenario& scenario);

/// Sweep visibility per tick under the full disturbance set, series "vis_*".
RunOutput run_visibility_timeseries(const Scenario& scenario);

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

inline constexpr int kVerifyTrials = 10000;
inline constexpr int kPhaseGridPoints = 1000;
inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kVisibilityTolerance = 1e-9;

/// Overwrites every common phase and both modulator phases of `cfg` with the
/// k-th point of a low-discrepancy grid over [0, 2 pi)^7.
void apply_phase_grid_point(SystemConfig& cfg, int k);

/// Battery of stability checks on the configured system:
///   power_expansion           expanded power vs. field norm under random channels
///   channel_cancellation  power unchanged when C is replaced by Haar unitaries
///   closed_form_fringe         P_in (1 + cos Delta) / 8 over the phase grid
///   arm_equality          A1 = A2 and B1 = B2 (Frobenius, default tolerance)
///   unit_visibility       sweep visibility 1 under random channels
///   pm_arms_special_case       the same system with identity arms passes the closed form and unit visibility
/// Deviations are relative to P_in for power checks.
VerifyReport run_verify_conditions(const Scenario& scenario);

/// Writes "check=<name> status=<pass|fail> max_deviation=<17 digits>" lines.
std::string format_report(const VerifyReport& report);

}  // namespace qkdsim
