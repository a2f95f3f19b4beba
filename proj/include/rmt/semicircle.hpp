#pragma once

#include <cmath>

#include "rmt/types.hpp"

namespace rmt {

/// Semicircle density (1 / 2pi) sqrt((4 - x^2)_+) on [-2, 2].
double semicircle_density(double x);

/// Closed-form distribution function of the semicircle law.
double semicircle_cdf(double x);

/// Stieltjes transform m(z) of the semicircle law, the root of
/// m^2 + z m + 1 = 0 with m(z) ~ -1/z at infinity.  Valid for any z off the
/// support [-2, 2]; on the open upper half-plane m is the Herglotz branch.
/// Throws for z on the support with zero imaginary part.
Complex stieltjes_m(Complex z);

/// Derivative m'(z) = m(z)^2 / (1 - m(z)^2).
Complex stieltjes_m_prime(Complex z);

/// Classical outlier location theta(d) = d + 1/d for |d| > 1.
double theta(double d);

enum class ThetaBranch { negative, positive };

/// Inverse of theta on a fixed branch: returns d with |d| > 1 and
/// theta(d) = t.  Requires |t| >= 2 and the branch matching the sign of t.
double theta_inverse(double t, ThetaBranch branch);

/// Distance to the spectral edge, kappa(E) = | |E| - 2 |.
double edge_distance(double e);

/// Classical eigenvalue locations gamma_1 <= ... <= gamma_n defined by
/// n * F(gamma_a) = a with F the semicircle distribution function.
RealVector classical_locations(Index n);

/// Slowly growing control parameter phi(n) = (log n)^(log log n); n >= 3.
double control_parameter(Index n);

/// Parameters steering outlier detection and block formation.
///
/// The literal detection threshold on |d| - 1 is phi^K * n^(-1/3), which is
/// far above any realistic deformation strength at desk-scale n (phi(1000)^2
/// is about 1755).  The default mode therefore uses outlier_factor * n^(-1/3)
/// and keeps the literal rule behind a switch.  The fine block cutoff is
/// s_cutoff; the coarse cutoff stays at phi^(K/2) in both modes.
struct ControlParams {
  Index n = 0;
  double k_exponent = 2.0;
  double s_cutoff = 10.0;
  double outlier_factor = 5.0;
  bool literal_phi_threshold = false;

  /// Threshold on |d| - 1 above which an index counts as an outlier.
  double outlier_threshold() const {
    const double n13 = std::pow(static_cast<double>(n), -1.0 / 3.0);
    if (literal_phi_threshold)
      return std::pow(control_parameter(n), k_exponent) * n13;
    return outlier_factor * n13;
  }

  double fine_cutoff() const { return s_cutoff; }

  double coarse_cutoff() const {
    return std::pow(control_parameter(n), k_exponent / 2.0);
  }
};

}  // namespace rmt
