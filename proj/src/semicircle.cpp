#include "rmt/semicircle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rmt {

namespace {
constexpr double kPi = std::numbers::pi;
}

double semicircle_density(double x) {
  const double q = 4.0 - x * x;
  return q > 0.0 ? std::sqrt(q) / (2.0 * kPi) : 0.0;
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * kPi) + std::asin(0.5 * x) / kPi;
}

Complex stieltjes_m(Complex z) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0)
    throw std::invalid_argument("stieltjes_m: z lies on the support [-2, 2]");
  const Complex sq = std::sqrt(z * z - 4.0);
  const Complex a = 0.5 * (-z + sq);
  const Complex b = 0.5 * (-z - sq);
  // The two roots multiply to 1; the Stieltjes branch is the one inside the
  // unit disk, which also matches m ~ -1/z at infinity.
  return std::abs(a) <= std::abs(b) ? a : b;
}

Complex stieltjes_m_prime(Complex z) {
  const Complex m = stieltjes_m(z);
  return m * m / (1.0 - m * m);
}

double theta(double d) {
  if (std::abs(d) <= 1.0)
    throw std::invalid_argument("theta: requires |d| > 1");
  return d + 1.0 / d;
}

double theta_inverse(double t, ThetaBranch branch) {
  if (std::abs(t) < 2.0)
    throw std::invalid_argument("theta_inverse: requires |t| >= 2");
  if ((t > 0.0) != (branch == ThetaBranch::positive))
    throw std::invalid_argument("theta_inverse: branch does not match sign of t");
  const double s = t > 0.0 ? 1.0 : -1.0;
  const double at = std::abs(t);
  // Stable quadratic root: |d| = (|t| + sqrt(t^2 - 4)) / 2 >= 1.
  return s * 0.5 * (at + std::sqrt(at * at - 4.0));
}

double edge_distance(double e) { return std::abs(std::abs(e) - 2.0); }

RealVector classical_locations(Index n) {
  if (n < 1) throw std::invalid_argument("classical_locations: n >= 1 required");
  RealVector gamma(n);
  for (Index a = 1; a <= n; ++a) {
    const double target = static_cast<double>(a) / static_cast<double>(n);
    if (a == n) {
      gamma[a - 1] = 2.0;
      continue;
    }
    double lo = -2.0, hi = 2.0;
    // Bisection on the strictly increasing closed-form CDF; 100 halvings
    // land far below the 1e-12 target tolerance.
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (semicircle_cdf(mid) < target ? lo : hi) = mid;
    }
    gamma[a - 1] = 0.5 * (lo + hi);
  }
  return gamma;
}

double control_parameter(Index n) {
  if (n < 3)
    throw std::invalid_argument("control_parameter: n >= 3 required, got " +
                                std::to_string(n));
  const double ln = std::log(static_cast<double>(n));
  return std::pow(ln, std::log(ln));
}

}  // namespace rmt
