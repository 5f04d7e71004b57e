// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qkdsim/csv.hpp"
#include "qkdsim/experiment.hpp"
#include "qkdsim/stats.hpp"

using namespace qkdsim;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;
double worst_unitarity = 0.0;

void run(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = time_limit_s <= 0.0 || elapsed < time_limit_s;
  const bool ok = outcome.passed && in_time;
  if (!ok) ++failures;
  char timing[96];
  if (time_limit_s > 0.0) {
    std::snprintf(timing, sizeof timing, "time=%.2fs limit=%.0fs", elapsed, time_limit_s);
  } else {
    std::snprintf(timing, sizeof timing, "time=%.2fs", elapsed);
  }
  std::printf("%s [%d] %s: %s %s\n", ok ? "PASS" : "FAIL", id, title, outcome.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

SystemConfig random_config(Rng& rng) {
  SystemConfig cfg;
  for (FiberElement* e : {&cfg.arm_a1, &cfg.arm_a2, &cfg.arm_b1, &cfg.arm_b2, &cfg.channel}) {
    e->transport = haar_unitary(rng);
    e->common_phase = 2.0 * kPi * rng.uniform();
  }
  cfg.phi_a = 2.0 * kPi * rng.uniform();
  cfg.phi_b = 2.0 * kPi * rng.uniform();
  cfg.input_state = {complex{rng.normal(), rng.normal()}, complex{rng.normal(), rng.normal()}};
  return cfg;
}

Scenario calibrated(ExperimentKind kind, std::vector<double> lengths, std::vector<std::uint64_t> seeds,
                    std::uint64_t ticks, double dt) {
  Scenario s;
  s.experiment.kind = kind;
  s.experiment.fiber_length_km = std::move(lengths);
  s.experiment.seeds = std::move(seeds);
  s.experiment.duration_ticks = ticks;
  s.experiment.dt_seconds = dt;
  s.disturbance = *disturbance_preset("paper-like", dt);
  return s;
}

std::string csv_bytes(const RunOutput& out) {
  std::ostringstream os;
  write_csv(os, out.series);
  return os.str();
}

}  // namespace

int main() {
  run(1, "expanded power equals summed-field power", 5.0, [] {
    Rng rng(101);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const auto cfg = random_config(rng);
      worst = std::max(worst, std::abs(output_power(cfg) - output_field(cfg).power()) / cfg.input_power());
    }
    return Outcome{worst <= 1e-12, fmt("configs=10000 max_rel_dev=%.3g tol=1e-12", worst)};
  });

  run(2, "matched Bob arms cancel the channel", 1.0, [] {
    Rng rng(102);
    auto cfg = random_config(rng);
    cfg.arm_b2.transport = cfg.arm_b1.transport;
    const double reference = output_power(cfg);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      cfg.channel.transport = haar_unitary(rng);
      worst = std::max(worst, std::abs(output_power(cfg) - reference) / cfg.input_power());
    }
    return Outcome{worst <= 1e-12, fmt("channels=1000 max_rel_dev=%.3g tol=1e-12", worst)};
  });

  run(3, "matched arms follow the closed-form fringe", 0.0, [] {
    Rng rng(103);
    auto base = random_config(rng);
    base.arm_a2.transport = base.arm_a1.transport;
    base.arm_b2.transport = base.arm_b1.transport;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      auto cfg = base;
      apply_phase_grid_point(cfg, k);
      const double d = (cfg.arm_a1.common_phase - cfg.arm_a2.common_phase) +
                       (cfg.arm_b2.common_phase - cfg.arm_b1.common_phase) + (cfg.phi_b - cfg.phi_a);
      const double expected = cfg.input_power() * (1.0 + std::cos(d)) / 8.0;
      worst = std::max(worst, std::abs(output_power(cfg) - expected) / cfg.input_power());
    }
    return Outcome{worst <= 1e-12, fmt("grid_points=1000 max_rel_dev=%.3g tol=1e-12", worst)};
  });

  run(4, "unit visibility under stability conditions", 0.0, [] {
    Rng rng(104);
    auto cfg = random_config(rng);
    cfg.arm_a2.transport = cfg.arm_a1.transport;
    cfg.arm_b2.transport = cfg.arm_b1.transport;
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      cfg.channel.transport = haar_unitary(rng);
      worst = std::max(worst, std::abs(sweep_visibility(cfg) - 1.0));
    }
    return Outcome{worst <= 1e-9, fmt("channels=10000 max_dev=%.3g tol=1e-9", worst)};
  });

  run(5, "sweep and analytic visibility agree", 0.0, [] {
    Rng rng(105);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const auto cfg = random_config(rng);
      worst = std::max(worst, std::abs(sweep_visibility(cfg) - analytic_visibility(cfg)));
    }
    return Outcome{worst <= 1e-9, fmt("configs=10000 max_dev=%.3g tol=1e-9", worst)};
  });

  run(6, "visibility fluctuation versus channel length", 60.0, [] {
    const std::vector<double> lengths{0.0, 25.0, 50.0, 55.0, 75.0};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
    const auto out = run_visibility_timeseries(
        calibrated(ExperimentKind::visibility_timeseries, lengths, seeds, 20000, 1.08));
    worst_unitarity = std::max(worst_unitarity, out.max_unitarity_error);

    double max_range_l0 = 0.0;
    double min_range_long = 1.0;
    std::map<double, double> rate_sum;
    for (const auto& s : out.summaries) {
      if (s.fiber_length_km == 0.0) {
        max_range_l0 = std::max(max_range_l0, s.range);
      } else {
        min_range_long = std::min(min_range_long, s.range);
      }
      rate_sum[s.fiber_length_km] += s.fluctuation_rate();
    }
    std::vector<double> mean_rate;
    for (double l : lengths) mean_rate.push_back(rate_sum[l] / static_cast<double>(seeds.size()));
    const double rho = spearman_rank_correlation(lengths, mean_rate);

    const bool ok = max_range_l0 < 0.05 && min_range_long > 0.8 && rho >= 0.9;
    return Outcome{ok, fmt("L0_max_range=%.4f (<0.05) long_min_range=%.4f (>0.8) spearman=%.3f (>=0.9)",
                           max_range_l0, min_range_long, rho)};
  });

  RunOutput fringe_first;
  run(7, "fringe envelope at 75 km", 30.0, [&] {
    fringe_first = run_fringe(calibrated(ExperimentKind::fringe, {75.0}, {1}, 10000, 2.16));
    worst_unitarity = std::max(worst_unitarity, fringe_first.max_unitarity_error);
    const double range = fringe_first.summaries.at(0).range;
    return Outcome{range > 0.5, fmt("simulated_hours=%.1f envelope_range=%.4f (>0.5)", 10000 * 2.16 / 3600.0, range)};
  });

  run(8, "reruns give byte-identical CSV", 0.0, [&] {
    const auto again = run_fringe(calibrated(ExperimentKind::fringe, {75.0}, {1}, 10000, 2.16));
    const auto a = csv_bytes(fringe_first);
    const auto b = csv_bytes(again);
    auto drift = calibrated(ExperimentKind::drift, {0.002}, {1, 2}, 5000, 2.0);
    const bool drift_same = csv_bytes(run_drift(drift)) == csv_bytes(run_drift(drift));
    const bool ok = !a.empty() && a == b && drift_same;
    return Outcome{ok, fmt("fringe_csv_bytes=%.0f identical=%.0f drift_identical=%.0f", static_cast<double>(a.size()),
                           a == b ? 1.0 : 0.0, drift_same ? 1.0 : 0.0)};
  });

  run(9, "compiled transports stay unitary", 0.0, [] {
    return Outcome{worst_unitarity <= 1e-9, fmt("max_unitarity_error=%.3g tol=1e-9", worst_unitarity)};
  });

  std::printf("%s: %d failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
