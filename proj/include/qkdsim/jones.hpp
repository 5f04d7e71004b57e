#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qkdsim {

using complex = std::complex<double>;

/// Two-component complex field amplitude (horizontal, vertical).
struct JonesVector {
  complex a{};
  complex b{};

  /// |a|^2 + |b|^2, no normalization applied.
  double power() const { return std::norm(a) + std::norm(b); }

  friend bool operator==(const JonesVector&, const JonesVector&) = default;
};

JonesVector operator*(complex s, const JonesVector& v);
JonesVector operator+(const JonesVector& x, const JonesVector& y);

/// E1^dagger E2
complex inner(const JonesVector& x, const JonesVector& y);

/// 2x2 complex matrix, row-major.
struct JonesMatrix {
  complex m00{1.0};
  complex m01{};
  complex m10{};
  complex m11{1.0};

  static JonesMatrix identity() { return {}; }
  static JonesMatrix diagonal(complex d0, complex d1) { return {d0, 0.0, 0.0, d1}; }

  friend bool operator==(const JonesMatrix&, const JonesMatrix&) = default;
};

JonesMatrix operator*(const JonesMatrix& x, const JonesMatrix& y);
JonesMatrix operator*(complex s, const JonesMatrix& m);
JonesMatrix operator+(const JonesMatrix& x, const JonesMatrix& y);
JonesMatrix operator-(const JonesMatrix& x, const JonesMatrix& y);
JonesVector operator*(const JonesMatrix& m, const JonesVector& v);

inline JonesVector apply(const JonesMatrix& m, const JonesVector& v) { return m * v; }

JonesMatrix adjoint(const JonesMatrix& m);
complex determinant(const JonesMatrix& m);
double frobenius_norm(const JonesMatrix& m);
double frobenius_distance(const JonesMatrix& x, const JonesMatrix& y);

/// ||M^dagger M - I||_F
double unitarity_error(const JonesMatrix& m);
inline bool is_unitary(const JonesMatrix& m, double tol = 1e-12) { return unitarity_error(m) <= tol; }

/// Deterministic generator state. One instance per trial; copying forks the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  double normal() { return normal_(engine_); }
  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-distributed element of U(2): a uniform unit quaternion gives SU(2),
/// an independent uniform global phase lifts it to U(2).
JonesMatrix haar_unitary(Rng& rng);

/// Unitary polar factor (nearest unitary in Frobenius norm).
/// Throws std::domain_error when both singular values are below 1e-6.
JonesMatrix reunitarize(const JonesMatrix& m);

/// Linear retarder with retardance `delta` and fast axis at angle `theta`:
/// R(theta) diag(e^{i delta/2}, e^{-i delta/2}) R(-theta).
JonesMatrix waveplate(double theta, double delta);

}  // namespace qkdsim
