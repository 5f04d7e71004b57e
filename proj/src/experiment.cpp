#include "qkdsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qkdsim/stats.hpp"

namespace qkdsim {

namespace {

struct Trial {
  double length_km;
  std::uint64_t seed;
};

std::vector<Trial> trials_of(const ExperimentSpec& spec) {
  std::vector<Trial> trials;
  for (double l : spec.fiber_length_km) {
    for (auto s : spec.seeds) trials.push_back({l, s});
  }
  return trials;
}

// Results land in slot i regardless of which worker finished first.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_kind(const Scenario& scenario, ExperimentKind kind) {
  scenario.validate();
  if (scenario.experiment.kind != kind) {
    throw std::invalid_argument("experiment.kind: expected " + std::string(to_string(kind)) + ", got " +
                                std::string(to_string(scenario.experiment.kind)));
  }
}

DisturbanceSet tick_disturbance(const Scenario& scenario) {
  return scenario.disturbance.with_dt(scenario.experiment.dt_seconds);
}

SeriesSummary summarize(const TimeSeries& series, const Trial& trial, double dt) {
  const auto values = series.values();
  const auto stats = describe(values);
  SeriesSummary s;
  s.label = series.label;
  s.fiber_length_km = trial.length_km;
  s.seed = trial.seed;
  s.min = stats.min;
  s.max = stats.max;
  s.range = stats.range;
  s.std_dev = stats.std_dev;
  s.decorrelation_s = decorrelation_time(values, dt);
  return s;
}

std::string fixed17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> TimeSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

double SeriesSummary::fluctuation_rate() const {
  return std::isfinite(decorrelation_s) && decorrelation_s > 0.0 ? 1.0 / decorrelation_s : 0.0;
}

DisturbedSystem::DisturbedSystem(const SystemSpec& system, const DisturbanceSet& disturbance,
                                 double channel_length_km, Rng rng)
    : disturbance_(disturbance), rng_(std::move(rng)) {
  system.validate();
  disturbance_.validate();
  const ArmSpec* arms[4] = {&system.a1, &system.a2, &system.b1, &system.b2};
  for (int i = 0; i < 4; ++i) {
    auto& s = sections_[i];
    s.fiber = lumped_fiber(system.arm_length_km, arms[i]->theta, arms[i]->delta);
    s.element = FiberElement{JonesMatrix::identity(), arms[i]->phase, arms[i]->phase, system.arm_length_km};
    s.birefringence = &disturbance_.arm_birefringence;
    s.phase = &disturbance_.arm_phase;
  }
  auto& channel = sections_[4];
  channel.fiber = build_fiber(channel_length_km, system.segment_length_km, rng_);
  channel.element =
      FiberElement{JonesMatrix::identity(), system.channel_phase, system.channel_phase, channel_length_km};
  channel.birefringence = &disturbance_.channel_birefringence;
  channel.phase = &disturbance_.channel_phase;

  config_ = nominal_config(system);
  recompile();
}

void DisturbedSystem::step_birefringence() {
  for (auto& s : sections_) s.fiber = qkdsim::step_birefringence(std::move(s.fiber), *s.birefringence, rng_);
  recompile();
}

void DisturbedSystem::step_phases() {
  for (auto& s : sections_) s.element = step_phase_drift(std::move(s.element), *s.phase, rng_);
  recompile();
}

void DisturbedSystem::recompile() {
  FiberElement* targets[5] = {&config_.arm_a1, &config_.arm_a2, &config_.arm_b1, &config_.arm_b2,
                              &config_.channel};
  for (int i = 0; i < 5; ++i) {
    auto& s = sections_[i];
    s.element.transport = compile_transport(s.fiber);
    max_unitarity_error_ = std::max(max_unitarity_error_, unitarity_error(s.element.transport));
    *targets[i] = s.element;
  }
}

Rng trial_rng(std::uint64_t seed, double channel_length_km) {
  return Rng(seed, std::bit_cast<std::uint64_t>(channel_length_km));
}

std::string trial_label(const std::string& prefix, double fiber_length_km, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s_L%gkm_s%llu", prefix.c_str(), fiber_length_km,
                static_cast<unsigned long long>(seed));
  return buf;
}

RunOutput run_drift(const Scenario& scenario, const DriftOptions& options) {
  require_kind(scenario, ExperimentKind::drift);
  const auto& spec = scenario.experiment;
  const auto disturbance = tick_disturbance(scenario);
  const auto trials = trials_of(spec);

  struct Result {
    TimeSeries d1, d2;
    double unitarity = 0.0;
  };
  std::vector<Result> results(trials.size());
  parallel_for(trials.size(), [&](std::size_t i) {
    const auto& t = trials[i];
    SystemSpec system = scenario.system;
    system.phi_a = 0.0;
    system.phi_b = 0.0;
    DisturbedSystem sim(system, disturbance, t.length_km, trial_rng(t.seed, t.length_km));
    Result& r = results[i];
    r.d1.label = trial_label("d1", t.length_km, t.seed);
    r.d2.label = trial_label("d2", t.length_km, t.seed);
    r.d1.points.reserve(spec.duration_ticks);
    r.d2.points.reserve(spec.duration_ticks);
    for (std::uint64_t tick = 0; tick < spec.duration_ticks; ++tick) {
      const double time = static_cast<double>(tick) * spec.dt_seconds;
      SystemConfig cfg = sim.config();
      if (options.scripted_alpha1) cfg.arm_a1.common_phase += options.scripted_alpha1(time);
      r.d1.points.push_back({tick, time, output_power(cfg)});
      r.d2.points.push_back({tick, time, complementary_power(cfg)});
      sim.step_phases();
    }
    r.unitarity = sim.max_unitarity_error();
  });

  RunOutput out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    out.summaries.push_back(summarize(results[i].d1, trials[i], spec.dt_seconds));
    out.series.push_back(std::move(results[i].d1));
    out.series.push_back(std::move(results[i].d2));
    out.max_unitarity_error = std::max(out.max_unitarity_error, results[i].unitarity);
  }
  return out;
}

RunOutput run_fringe(const Scenario& scenario) {
  require_kind(scenario, ExperimentKind::fringe);
  const auto& spec = scenario.experiment;
  const auto disturbance = tick_disturbance(scenario);
  const auto trials = trials_of(spec);
  const auto n = static_cast<std::uint64_t>(spec.sweep_samples);

  struct Result {
    TimeSeries fringe, envelope;
    double unitarity = 0.0;
  };
  std::vector<Result> results(trials.size());
  parallel_for(trials.size(), [&](std::size_t i) {
    const auto& t = trials[i];
    DisturbedSystem sim(scenario.system, disturbance, t.length_km, trial_rng(t.seed, t.length_km));
    Result& r = results[i];
    r.fringe.label = trial_label("fringe", t.length_km, t.seed);
    r.envelope.label = trial_label("envelope", t.length_km, t.seed);
    r.fringe.points.reserve(spec.duration_ticks * n);
    r.envelope.points.reserve(spec.duration_ticks);
    for (std::uint64_t tick = 0; tick < spec.duration_ticks; ++tick) {
      const double start = static_cast<double>(tick) * spec.dt_seconds;
      const auto samples = sweep_fringe(sim.config(), spec.sweep_samples);
      for (std::uint64_t k = 0; k < n; ++k) {
        const double time = start + spec.dt_seconds * static_cast<double>(k) / static_cast<double>(n);
        r.fringe.points.push_back({tick * n + k, time, samples[k].power});
      }
      r.envelope.points.push_back({tick, start, sweep_visibility(sim.config(), spec.sweep_samples)});
      sim.step_birefringence();
      sim.step_phases();
    }
    r.unitarity = sim.max_unitarity_error();
  });

  RunOutput out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    out.summaries.push_back(summarize(results[i].envelope, trials[i], spec.dt_seconds));
    out.series.push_back(std::move(results[i].fringe));
    out.series.push_back(std::move(results[i].envelope));
    out.max_unitarity_error = std::max(out.max_unitarity_error, results[i].unitarity);
  }
  return out;
}

RunOutput run_visibility_timeseries(const Scenario& scenario) {
  require_kind(scenario, ExperimentKind::visibility_timeseries);
  const auto& spec = scenario.experiment;
  const auto disturbance = tick_disturbance(scenario);
  const auto trials = trials_of(spec);

  struct Result {
    TimeSeries visibility;
    double unitarity = 0.0;
  };
  std::vector<Result> results(trials.size());
  parallel_for(trials.size(), [&](std::size_t i) {
    const auto& t = trials[i];
    DisturbedSystem sim(scenario.system, disturbance, t.length_km, trial_rng(t.seed, t.length_km));
    Result& r = results[i];
    r.visibility.label = trial_label("vis", t.length_km, t.seed);
    r.visibility.points.reserve(spec.duration_ticks);
    for (std::uint64_t tick = 0; tick < spec.duration_ticks; ++tick) {
      const double time = static_cast<double>(tick) * spec.dt_seconds;
      r.visibility.points.push_back({tick, time, sweep_visibility(sim.config(), spec.sweep_samples)});
      sim.step_birefringence();
      sim.step_phases();
    }
    r.unitarity = sim.max_unitarity_error();
  });

  RunOutput out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    out.summaries.push_back(summarize(results[i].visibility, trials[i], spec.dt_seconds));
    out.series.push_back(std::move(results[i].visibility));
    out.max_unitarity_error = std::max(out.max_unitarity_error, results[i].unitarity);
  }
  return out;
}

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void apply_phase_grid_point(SystemConfig& cfg, int k) {
  // Additive recurrence with irrational steps (square roots of primes).
  static constexpr double kSteps[7] = {1.4142135623730951, 1.7320508075688772, 2.2360679774997898,
                                       2.6457513110645907, 3.3166247903553998, 3.6055512754639891,
                                       4.1231056256176606};
  double phase[7];
  for (int j = 0; j < 7; ++j) {
    const double x = static_cast<double>(k) * kSteps[j];
    phase[j] = 2.0 * std::numbers::pi * (x - std::floor(x));
  }
  cfg.arm_a1.common_phase = phase[0];
  cfg.arm_a2.common_phase = phase[1];
  cfg.arm_b1.common_phase = phase[2];
  cfg.arm_b2.common_phase = phase[3];
  cfg.channel.common_phase = phase[4];
  cfg.phi_a = phase[5];
  cfg.phi_b = phase[6];
}

VerifyReport run_verify_conditions(const Scenario& scenario) {
  require_kind(scenario, ExperimentKind::verify_conditions);
  const auto& spec = scenario.experiment;
  const double length = spec.fiber_length_km.front();
  const std::uint64_t seed = spec.seeds.front();
  const int sweep_n = spec.sweep_samples;

  Rng rng = trial_rng(seed, length);
  const JonesMatrix channel = compile_transport(build_fiber(length, scenario.system.segment_length_km, rng));
  const SystemConfig base = nominal_config(scenario.system, channel);
  const double p_in = base.input_power();

  auto closed_form = [](const SystemConfig& cfg) {
    return cfg.input_power() * (1.0 + std::cos(differential_phase(cfg))) / 8.0;
  };
  auto check = [](std::string name, double deviation, double tol) {
    return CheckResult{std::move(name), deviation <= tol, deviation};
  };

  VerifyReport report;

  double expansion = 0.0;
  for (int k = 0; k < kVerifyTrials; ++k) {
    SystemConfig cfg = base;
    cfg.channel.transport = haar_unitary(rng);
    apply_phase_grid_point(cfg, k);
    expansion = std::max(expansion, std::abs(output_power(cfg) - output_field(cfg).power()) / p_in);
  }
  report.checks.push_back(check("power_expansion", expansion, kExactTolerance));

  // Phases are varied too: with waveplate arms at zero differential phase the
  // channel only enters the imaginary part of the cross term, which hides a
  // Bob mismatch.
  double cancellation = 0.0;
  for (int k = 0; k < kVerifyTrials; ++k) {
    SystemConfig reference = base;
    apply_phase_grid_point(reference, k % kPhaseGridPoints);
    SystemConfig cfg = reference;
    cfg.channel.transport = haar_unitary(rng);
    cancellation = std::max(cancellation, std::abs(output_power(cfg) - output_power(reference)) / p_in);
  }
  report.checks.push_back(check("channel_cancellation", cancellation, kExactTolerance));

  double closed = 0.0;
  for (int k = 0; k < kPhaseGridPoints; ++k) {
    SystemConfig cfg = base;
    apply_phase_grid_point(cfg, k);
    closed = std::max(closed, std::abs(output_power(cfg) - closed_form(cfg)) / p_in);
  }
  report.checks.push_back(check("closed_form_fringe", closed, kExactTolerance));

  const auto arms = check_stability_conditions(base);
  report.checks.push_back(CheckResult{"arm_equality", arms.alice_ok && arms.bob_ok,
                                      std::max(arms.alice_distance, arms.bob_distance)});

  double unit = 0.0;
  for (int k = 0; k < kVerifyTrials; ++k) {
    SystemConfig cfg = base;
    cfg.channel.transport = haar_unitary(rng);
    unit = std::max(unit, std::abs(1.0 - sweep_visibility(cfg, sweep_n)));
  }
  report.checks.push_back(check("unit_visibility", unit, kVisibilityTolerance));

  SystemConfig pm = base;
  for (FiberElement* arm : {&pm.arm_a1, &pm.arm_a2, &pm.arm_b1, &pm.arm_b2}) {
    arm->transport = JonesMatrix::identity();
  }
  double special = 0.0;
  for (int k = 0; k < kPhaseGridPoints; ++k) {
    SystemConfig cfg = pm;
    cfg.channel.transport = haar_unitary(rng);
    apply_phase_grid_point(cfg, k);
    special = std::max(special, std::abs(output_power(cfg) - closed_form(cfg)) / p_in);
    special = std::max(special, std::abs(1.0 - sweep_visibility(cfg, sweep_n)));
  }
  report.checks.push_back(check("pm_arms_special_case", special, kVisibilityTolerance));

  return report;
}

std::string format_report(const VerifyReport& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << "check=" << c.name << " status=" << (c.passed ? "pass" : "fail")
       << " max_deviation=" << fixed17(c.max_deviation) << '\n';
  }
  return os.str();
}

}  // namespace qkdsim
