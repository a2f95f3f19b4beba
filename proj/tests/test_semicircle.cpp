#include <cmath>
#include <complex>

#include "doctest.h"
#include "rmt/rng.hpp"
#include "rmt/semicircle.hpp"

using namespace rmt;

TEST_CASE("stieltjes transform satisfies its quadratic equation off support") {
  RandomStream rng(2024);
  for (int i = 0; i < 1000; ++i) {
    // Mix of real points outside [-2,2] and genuinely complex points.
    Complex z;
    if (i % 3 == 0) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      z = Complex(sign * (2.0 + 1e-3 + 8.0 * rng.uniform()), 0.0);
    } else {
      z = Complex(-6.0 + 12.0 * rng.uniform(), 1e-4 + 4.0 * rng.uniform());
    }
    const Complex m = stieltjes_m(z);
    CHECK(std::abs(m + 1.0 / m + z) < 1e-12);
    if (z.imag() > 0.0) CHECK(m.imag() > 0.0);
    CHECK(std::abs(m) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(stieltjes_m(Complex(0.5, 0.0)), std::invalid_argument);
}

TEST_CASE("stieltjes transform at the classical outlier location") {
  for (double d : {-3.5, -2.0, -1.2, 1.05, 1.5, 2.0, 4.0}) {
    const double t = theta(d);
    CHECK(std::abs(stieltjes_m(Complex(t, 0.0)) - Complex(-1.0 / d, 0.0)) < 1e-12);
    const Complex mp = stieltjes_m_prime(Complex(t, 0.0));
    CHECK(std::abs((std::abs(d) - 1.0) * mp.real() - 1.0 / (std::abs(d) + 1.0)) < 1e-10);
    CHECK(std::abs(mp.real() - 1.0 / (d * d - 1.0)) < 1e-10);
  }
}

TEST_CASE("theta and its branch inverse round trip") {
  for (double d : {-5.0, -2.5, -1.01, 1.01, 1.8, 3.0, 9.0}) {
    const double t = theta(d);
    const ThetaBranch branch = d < 0 ? ThetaBranch::negative : ThetaBranch::positive;
    CHECK(std::abs(theta_inverse(t, branch) - d) < 1e-12);
  }
  CHECK_THROWS_AS(theta(0.9), std::invalid_argument);
  CHECK_THROWS_AS(theta(0.0), std::invalid_argument);
  CHECK_THROWS_AS(theta_inverse(1.5, ThetaBranch::positive), std::invalid_argument);
  CHECK_THROWS_AS(theta_inverse(2.5, ThetaBranch::negative), std::invalid_argument);
}

TEST_CASE("semicircle density and distribution function") {
  CHECK(semicircle_density(0.0) == doctest::Approx(1.0 / 3.141592653589793).epsilon(1e-12));
  CHECK(semicircle_density(2.5) == 0.0);
  CHECK(semicircle_cdf(-2.0) == 0.0);
  CHECK(semicircle_cdf(2.0) == 1.0);
  CHECK(semicircle_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));

  // Simpson quadrature of the density reproduces the closed-form CDF.
  const double lo = -1.7, hi = 1.1;
  const int steps = 4000;
  double quad = 0.0;
  const double h = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = lo + i * h;
    quad += h / 6.0 *
            (semicircle_density(a) + 4.0 * semicircle_density(a + 0.5 * h) +
             semicircle_density(a + h));
  }
  CHECK(quad == doctest::Approx(semicircle_cdf(hi) - semicircle_cdf(lo)).epsilon(1e-10));
}

TEST_CASE("classical locations solve n F(gamma_a) = a") {
  const Index n = 57;
  const RealVector gamma = classical_locations(n);
  REQUIRE(gamma.size() == n);
  for (Index a = 1; a <= n; ++a)
    CHECK(std::abs(semicircle_cdf(gamma[a - 1]) - static_cast<double>(a) / n) < 1e-9);
  for (Index a = 1; a < n; ++a) CHECK(gamma[a - 1] < gamma[a]);
  CHECK(gamma[n - 1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("control parameter and detection thresholds") {
  CHECK(control_parameter(1000) == doctest::Approx(41.89287092792307).epsilon(1e-12));
  CHECK(control_parameter(100) > control_parameter(50));
  CHECK_THROWS_AS(control_parameter(2), std::invalid_argument);

  ControlParams cp;
  cp.n = 1000;
  CHECK(cp.outlier_threshold() ==
        doctest::Approx(5.0 * std::pow(1000.0, -1.0 / 3.0)).epsilon(1e-13));
  cp.literal_phi_threshold = true;
  CHECK(cp.outlier_threshold() ==
        doctest::Approx(std::pow(control_parameter(1000), 2.0) *
                        std::pow(1000.0, -1.0 / 3.0))
            .epsilon(1e-10));
  CHECK(cp.coarse_cutoff() == doctest::Approx(control_parameter(1000)).epsilon(1e-12));

  CHECK(edge_distance(2.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(edge_distance(-0.5) == doctest::Approx(1.5).epsilon(1e-14));
}
