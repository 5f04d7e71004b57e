#include "qkdsim/jones.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkdsim {

JonesVector operator*(complex s, const JonesVector& v) { return {s * v.a, s * v.b}; }

JonesVector operator+(const JonesVector& x, const JonesVector& y) { return {x.a + y.a, x.b + y.b}; }

complex inner(const JonesVector& x, const JonesVector& y) {
  return std::conj(x.a) * y.a + std::conj(x.b) * y.b;
}

JonesMatrix operator*(const JonesMatrix& x, const JonesMatrix& y) {
  return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
          x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}

JonesMatrix operator*(complex s, const JonesMatrix& m) {
  return {s * m.m00, s * m.m01, s * m.m10, s * m.m11};
}

JonesMatrix operator+(const JonesMatrix& x, const JonesMatrix& y) {
  return {x.m00 + y.m00, x.m01 + y.m01, x.m10 + y.m10, x.m11 + y.m11};
}

JonesMatrix operator-(const JonesMatrix& x, const JonesMatrix& y) {
  return {x.m00 - y.m00, x.m01 - y.m01, x.m10 - y.m10, x.m11 - y.m11};
}

JonesVector operator*(const JonesMatrix& m, const JonesVector& v) {
  return {m.m00 * v.a + m.m01 * v.b, m.m10 * v.a + m.m11 * v.b};
}

JonesMatrix adjoint(const JonesMatrix& m) {
  return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01), std::conj(m.m11)};
}

complex determinant(const JonesMatrix& m) { return m.m00 * m.m11 - m.m01 * m.m10; }

double frobenius_norm(const JonesMatrix& m) {
  return std::sqrt(std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) + std::norm(m.m11));
}

double frobenius_distance(const JonesMatrix& x, const JonesMatrix& y) { return frobenius_norm(x - y); }

double unitarity_error(const JonesMatrix& m) {
  return frobenius_distance(adjoint(m) * m, JonesMatrix::identity());
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

JonesMatrix haar_unitary(Rng& rng) {
  double q[4];
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : q) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 < 1e-300);
  const double inv = 1.0 / std::sqrt(norm2);
  const complex a{q[0] * inv, q[1] * inv};
  const complex b{q[2] * inv, q[3] * inv};
  const complex phase = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
  return phase * JonesMatrix{a, -std::conj(b), b, std::conj(a)};
}

JonesMatrix reunitarize(const JonesMatrix& m) {
  // With M = W S V^dagger and s1 s2 = |det M|, the matrix
  // M + (det M / |det M|) adj(M)^dagger equals (s1 + s2) W V^dagger.
  const double frob2 = std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) + std::norm(m.m11);
  const complex det = determinant(m);
  const double abs_det = std::abs(det);
  const double disc = std::sqrt(std::max(0.0, frob2 * frob2 - 4.0 * abs_det * abs_det));
  const double s_max = std::sqrt(0.5 * (frob2 + disc));
  if (s_max < 1e-6) {
    throw std::domain_error("reunitarize: matrix is singular (singular values below 1e-6)");
  }
  const complex phase = abs_det > 0.0 ? det / abs_det : complex{1.0};
  const JonesMatrix cofactor_adj{std::conj(m.m11), -std::conj(m.m10), -std::conj(m.m01),
                                 std::conj(m.m00)};
  const JonesMatrix sum = m + phase * cofactor_adj;
  const double scale = std::sqrt(2.0) / frobenius_norm(sum);
  return complex{scale} * sum;
}

JonesMatrix waveplate(double theta, double delta) {
  const double c = std::cos(0.5 * delta);
  const double s = std::sin(0.5 * delta);
  const double c2 = std::cos(2.0 * theta);
  const double s2 = std::sin(2.0 * theta);
  const complex off{0.0, s * s2};
  return {complex{c, s * c2}, off, off, complex{c, -s * c2}};
}

}  // namespace qkdsim
