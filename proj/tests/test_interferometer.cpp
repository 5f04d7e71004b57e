#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkdsim/interferometer.hpp"

using namespace qkdsim;

namespace {

constexpr double kPi = std::numbers::pi;

using Array2 = std::array<std::array<complex, 2>, 2>;

Array2 to_array(const JonesMatrix& m) { return {{{m.m00, m.m01}, {m.m10, m.m11}}}; }

Array2 multiply(const Array2& x, const Array2& y) {
  Array2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) out[i][j] += x[i][k] * y[k][j];
  return out;
}

Array2 dagger(const Array2& x) {
  Array2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = std::conj(x[j][i]);
  return out;
}

double max_abs_diff(const JonesMatrix& m, const Array2& a) {
  const auto b = to_array(m);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(b[i][j] - a[i][j]));
  return worst;
}

// Field at the detector summed path by path, written independently of the library.
double field_power_oracle(const SystemConfig& c) {
  const Array2 a1 = to_array(c.arm_a1.transport), a2 = to_array(c.arm_a2.transport);
  const Array2 b1 = to_array(c.arm_b1.transport), b2 = to_array(c.arm_b2.transport);
  const Array2 ch = to_array(c.channel.transport);
  const Array2 m1 = multiply(b2, multiply(ch, a1));
  const Array2 m2 = multiply(b1, multiply(ch, a2));
  const double t1 = c.arm_a1.common_phase + c.channel.common_phase + c.arm_b2.common_phase + c.phi_b;
  const double t2 = c.arm_a2.common_phase + c.phi_a + c.channel.common_phase + c.arm_b1.common_phase;
  const complex e[2] = {c.input_state.a, c.input_state.b};
  double power = 0.0;
  for (int i = 0; i < 2; ++i) {
    complex out = 0.0;
    for (int j = 0; j < 2; ++j) {
      out += (std::polar(1.0, t1) * m1[i][j] + std::polar(1.0, t2) * m2[i][j]) * e[j] / 4.0;
    }
    power += std::norm(out);
  }
  return power;
}

// Brute-force contrast from a dense phi_B scan.
double dense_scan_visibility(SystemConfig cfg, int n) {
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < n; ++k) {
    cfg.phi_b = 2.0 * kPi * k / n;
    const double p = field_power_oracle(cfg);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return (hi - lo) / (hi + lo);
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

}  // namespace

TEST_CASE("path transforms") {
  SystemConfig cfg;
  auto p1 = path1_transform(cfg);
  auto p2 = path2_transform(cfg);
  CHECK(p1.matrix == JonesMatrix::identity());
  CHECK(p1.total_phase == 0.0);
  CHECK(p2.matrix == JonesMatrix::identity());
  CHECK(p2.total_phase == 0.0);

  cfg.arm_a1.common_phase = 0.1;
  cfg.arm_b2.common_phase = 0.2;
  cfg.channel.common_phase = 0.3;
  cfg.phi_b = 0.4;
  cfg.arm_a2.common_phase = 0.01;
  cfg.arm_b1.common_phase = 0.02;
  cfg.phi_a = 0.05;
  CHECK(path1_transform(cfg).total_phase == doctest::Approx(1.0));
  CHECK(path2_transform(cfg).total_phase == doctest::Approx(0.01 + 0.02 + 0.3 + 0.05));

  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = random_config(rng);
    const auto m1 = multiply(to_array(c.arm_b2.transport), multiply(to_array(c.channel.transport), to_array(c.arm_a1.transport)));
    const auto m2 = multiply(to_array(c.arm_b1.transport), multiply(to_array(c.channel.transport), to_array(c.arm_a2.transport)));
    CHECK(max_abs_diff(path1_transform(c).matrix, m1) < 1e-14);
    CHECK(max_abs_diff(path2_transform(c).matrix, m2) < 1e-14);
    CHECK(unitarity_error(path1_transform(c).matrix) <= 1e-12);
  }
}

TEST_CASE("output field in the identity configuration") {
  SystemConfig cfg;
  cfg.input_state = {0.6, complex{0.0, 0.8}};
  const auto bright = output_field(cfg);
  CHECK(std::abs(bright.a - 0.3) < 1e-15);
  CHECK(std::abs(bright.b - complex{0.0, 0.4}) < 1e-15);
  CHECK(output_power(cfg) == doctest::Approx(0.25));

  cfg.phi_b = kPi;
  CHECK(output_field(cfg).power() < 1e-30);
  CHECK(std::abs(output_power(cfg)) < 1e-16);

  cfg.phi_b = kPi / 2;
  CHECK(output_power(cfg) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("expanded power matches the summed field") {
  Rng rng(22);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto cfg = random_config(rng);
    const double p_in = cfg.input_power();
    worst = std::max(worst, std::abs(output_power(cfg) - field_power_oracle(cfg)) / p_in);
    worst = std::max(worst, std::abs(output_field(cfg).power() - field_power_oracle(cfg)) / p_in);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("energy bound and complementary port") {
  Rng rng(23);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto cfg = random_config(rng);
    const double p_in = cfg.input_power();
    const double p = output_power(cfg);
    CHECK(p >= -1e-12 * p_in);
    CHECK(p <= p_in / 4 * (1 + 1e-12));
    CHECK(std::abs(p + complementary_power(cfg) - p_in / 4) <= 1e-12 * p_in);
  }
}

TEST_CASE("interference operator") {
  SystemConfig cfg;
  CHECK(interference_operator(cfg) == JonesMatrix::identity());

  Rng rng(24);
  for (int trial = 0; trial < 500; ++trial) {
    auto c = random_config(rng);
    const auto a1 = to_array(c.arm_a1.transport), a2 = to_array(c.arm_a2.transport);
    const auto b1 = to_array(c.arm_b1.transport), b2 = to_array(c.arm_b2.transport);
    const auto ch = to_array(c.channel.transport);
    const auto oracle = multiply(dagger(a1), multiply(dagger(ch), multiply(dagger(b2), multiply(b1, multiply(ch, a2)))));
    CHECK(max_abs_diff(interference_operator(c), oracle) < 1e-14);

    // Matched Bob arms: the channel drops out.
    c.arm_b2.transport = c.arm_b1.transport;
    CHECK(max_abs_diff(interference_operator(c), multiply(dagger(a1), a2)) < 1e-14);
  }
}

TEST_CASE("channel cancellation with matched Bob arms") {
  Rng rng(25);
  for (int config = 0; config < 20; ++config) {
    auto cfg = random_config(rng);
    cfg.arm_b2.transport = cfg.arm_b1.transport;
    const double reference = output_power(cfg);
    for (int k = 0; k < 500; ++k) {
      cfg.channel.transport = haar_unitary(rng);
      CHECK(std::abs(output_power(cfg) - reference) <= 1e-12 * cfg.input_power());
    }
  }
}

TEST_CASE("closed-form fringe with matched arms") {
  Rng rng(26);
  for (int trial = 0; trial < 2000; ++trial) {
    auto cfg = random_config(rng);
    cfg.arm_a2.transport = cfg.arm_a1.transport;
    cfg.arm_b2.transport = cfg.arm_b1.transport;
    const double d = (cfg.arm_a1.common_phase - cfg.arm_a2.common_phase) +
                     (cfg.arm_b2.common_phase - cfg.arm_b1.common_phase) + (cfg.phi_b - cfg.phi_a);
    const double expected = cfg.input_power() * (1.0 + std::cos(d)) / 8.0;
    CHECK(std::abs(output_power(cfg) - expected) <= 1e-12 * cfg.input_power());
    CHECK(differential_phase(cfg) == doctest::Approx(d));
  }
}

TEST_CASE("analytic visibility") {
  SystemConfig cfg;
  CHECK(analytic_visibility(cfg) == doctest::Approx(1.0));

  // M = diag(1, -1) via A2 = diag(1, -1); input (1, 1)/sqrt2.
  cfg.arm_a2.transport = JonesMatrix::diagonal(1.0, -1.0);
  cfg.input_state = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  CHECK(analytic_visibility(cfg) < 1e-15);

  cfg.input_state = {0.0, 0.0};
  CHECK_THROWS_AS(analytic_visibility(cfg), std::invalid_argument);
  CHECK_THROWS_AS(sweep_visibility(cfg), std::invalid_argument);
}

TEST_CASE("sweep visibility") {
  SystemConfig cfg;
  CHECK(sweep_visibility(cfg) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sweep_visibility(cfg, 15), std::invalid_argument);

  const auto samples = sweep_fringe(cfg, 16);
  REQUIRE(samples.size() == 16);
  CHECK(samples[0].power == doctest::Approx(0.25));
  CHECK(samples[8].power == doctest::Approx(0.0));
  for (const auto& s : samples) CHECK(s.power >= 0.0);

  Rng rng(27);
  SUBCASE("matches the analytic value and a dense scan") {
    for (int trial = 0; trial < 2000; ++trial) {
      const auto c = random_config(rng);
      const double sweep = sweep_visibility(c);
      CHECK(std::abs(sweep - analytic_visibility(c)) <= 1e-9);
      CHECK(std::abs(sweep_visibility(c, 64) - sweep) <= 1e-9);
      if (trial < 50) CHECK(std::abs(dense_scan_visibility(c, 20000) - sweep) <= 1e-6);
    }
  }

  SUBCASE("matched arms give unit visibility under any channel") {
    auto c = random_config(rng);
    c.arm_a2.transport = c.arm_a1.transport;
    c.arm_b2.transport = c.arm_b1.transport;
    for (int k = 0; k < 2000; ++k) {
      c.channel.transport = haar_unitary(rng);
      CHECK(std::abs(sweep_visibility(c) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("visibility is immune to common phases") {
  Rng rng(28);
  for (int trial = 0; trial < 200; ++trial) {
    auto cfg = random_config(rng);
    const double v = analytic_visibility(cfg);
    for (int k = 0; k < 10; ++k) {
      for (FiberElement* e : {&cfg.arm_a1, &cfg.arm_a2, &cfg.arm_b1, &cfg.arm_b2, &cfg.channel}) {
        e->common_phase = 20.0 * rng.normal();
      }
      cfg.phi_a = 2.0 * kPi * rng.uniform();
      CHECK(std::abs(analytic_visibility(cfg) - v) <= 1e-12);
      CHECK(std::abs(sweep_visibility(cfg) - v) <= 1e-9);
    }
  }
}

TEST_CASE("stability conditions") {
  SystemConfig cfg;
  auto check = check_stability_conditions(cfg);
  CHECK(check.alice_ok);
  CHECK(check.bob_ok);

  cfg.arm_a2.transport = waveplate(0.0, kPi);
  check = check_stability_conditions(cfg);
  CHECK_FALSE(check.alice_ok);
  CHECK(check.bob_ok);
  CHECK(check.alice_distance == doctest::Approx(2.0));

  Rng rng(29);
  const auto u = haar_unitary(rng);
  cfg.arm_a1.transport = u;
  cfg.arm_a2.transport = u;
  CHECK(check_stability_conditions(cfg).alice_ok);

  // A global phase on one arm is a real difference between the matrices.
  cfg.arm_b2.transport = std::polar(1.0, 0.1) * JonesMatrix::identity();
  CHECK_FALSE(check_stability_conditions(cfg).bob_ok);

  CHECK_THROWS_AS(check_stability_conditions(cfg, 0.0), std::invalid_argument);
}

TEST_CASE("qber from visibility") {
  CHECK(qber_from_visibility(1.0) == 0.0);
  CHECK(qber_from_visibility(0.0) == 0.5);
  CHECK(qber_from_visibility(0.9) == doctest::Approx(0.05));
  CHECK_THROWS_AS(qber_from_visibility(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(qber_from_visibility(1.1), std::invalid_argument);
  CHECK_THROWS_AS(qber_from_visibility(std::nan("")), std::invalid_argument);
}

TEST_CASE("config validation rejects non-unitary transports") {
  SystemConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.channel.transport = complex{1.1} * JonesMatrix::identity();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
