#include <cmath>

#include "doctest.h"
#include "rmt/ensemble.hpp"
#include "rmt/spectra.hpp"

using namespace rmt;

namespace {

SelfAdjointMatrix random_real_symmetric(Index n, RandomStream& rng, double scale = 1.0) {
  RealMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
  m = 0.5 * (m + m.transpose()).eval();
  return SelfAdjointMatrix(std::move(m));
}

}  // namespace

TEST_CASE("eigenvalues come back ascending with known values") {
  RealMatrix diag = RealMatrix::Zero(3, 3);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  diag(2, 2) = 2.0;
  const RealVector ev = eigenvalues_sorted(SelfAdjointMatrix(diag));
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-14));

  RealMatrix invol(2, 2);
  invol << 0.0, 1.0, 1.0, 0.0;
  const RealVector iv = eigenvalues_sorted(SelfAdjointMatrix(invol));
  CHECK(iv[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(iv[1] == doctest::Approx(1.0).epsilon(1e-14));

  RealMatrix skew(2, 2);
  skew << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(eigenvalues_sorted(SelfAdjointMatrix(skew)), std::invalid_argument);
}

TEST_CASE("extreme eigenvalues match the dense solver on both paths") {
  RandomStream rng(808);
  {
    // Large enough for the iterative path.
    const Index n = 300;
    const WignerMatrix w = sample_wigner(n, SymmetryClass::real_symmetric,
                                         EntryDistribution::gaussian(), rng);
    ComplexMatrix v = ComplexMatrix::Zero(n, 2);
    v(0, 0) = 1.0;
    v(1, 1) = 1.0;
    RealVector d(2);
    d << -2.5, 2.5;
    const SelfAdjointMatrix a = deform(w, Deformation(v, d));
    const ExtremeEigenvalues ends = extreme_eigenvalues(a, 2, 2);
    CHECK_FALSE(ends.used_dense_path);
    const RealVector full = eigenvalues_sorted(a);
    CHECK(std::abs(ends.low[0] - full[0]) < 1e-8);
    CHECK(std::abs(ends.low[1] - full[1]) < 1e-8);
    CHECK(std::abs(ends.high[0] - full[n - 2]) < 1e-8);
    CHECK(std::abs(ends.high[1] - full[n - 1]) < 1e-8);
  }
  {
    // Small matrices go straight to the dense solver.
    const SelfAdjointMatrix a = random_real_symmetric(40, rng);
    const ExtremeEigenvalues ends = extreme_eigenvalues(a, 3, 1);
    CHECK(ends.used_dense_path);
    const RealVector full = eigenvalues_sorted(a);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(ends.low[i] - full[i]) < 1e-12);
    CHECK(std::abs(ends.high[0] - full[39]) < 1e-12);
  }
}

TEST_CASE("two-block perturbation bound on the closed-form example") {
  // A = diag(0, 10), B couples with unit norm: the lower eigenvalue of
  // [[0, 1], [1, 10]] is 5 - sqrt(26) and the bound is 1 / (10 - 2).
  BlockPerturbation bp;
  bp.a11 = ComplexMatrix::Zero(1, 1);
  bp.a22 = ComplexMatrix::Constant(1, 1, Complex(10.0, 0.0));
  bp.b12 = ComplexMatrix::Constant(1, 1, Complex(1.0, 0.0));
  const PerturbationReport rep = perturbation_bound(bp);
  CHECK(rep.gap == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(rep.coupling_norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.bound == doctest::Approx(0.125).epsilon(1e-14));
  REQUIRE(rep.perturbed.size() == 1);
  CHECK(rep.perturbed[0] == doctest::Approx(5.0 - std::sqrt(26.0)).epsilon(1e-12));
  CHECK(rep.deviations[0] <= rep.bound);
  CHECK(rep.holds);
}

TEST_CASE("perturbation bound requires a wide enough gap") {
  BlockPerturbation bp;
  bp.a11 = ComplexMatrix::Zero(1, 1);
  bp.a22 = ComplexMatrix::Constant(1, 1, Complex(2.0, 0.0));
  bp.b12 = ComplexMatrix::Constant(1, 1, Complex(1.0, 0.0));  // gap = 2 < 3
  CHECK_THROWS_AS(perturbation_bound(bp), std::invalid_argument);
}

TEST_CASE("perturbation bound holds across random well-separated instances") {
  RandomStream rng(4242);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const Index n1 = 1 + static_cast<Index>(rng.uniform_below(5));
    const Index n2 = 1 + static_cast<Index>(rng.uniform_below(5));
    BlockPerturbation bp;
    bp.a11 = random_real_symmetric(n1, rng, 0.4).to_complex();
    bp.a22 = random_real_symmetric(n2, rng, 0.4).to_complex();
    const double split = 4.0 + 6.0 * rng.uniform();
    bp.a22 += split * ComplexMatrix::Identity(n2, n2);
    ComplexMatrix b(n1, n2);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j) b(i, j) = 0.15 * rng.normal();
    bp.b12 = b;
    PerturbationReport report;
    try {
      report = perturbation_bound(bp);
    } catch (const std::invalid_argument&) {
      continue;  // random spectra may close the gap below the 3||B|| regime
    }
    ++checked;
    CHECK(report.holds);
    CHECK(report.deviations.maxCoeff() <= report.bound + 1e-10);
  }
  CHECK(checked > 200);
}

TEST_CASE("spectrum inclusion under self-adjoint perturbations") {
  RandomStream rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.uniform_below(8));
    const SelfAdjointMatrix a = random_real_symmetric(n, rng);
    const SelfAdjointMatrix b = random_real_symmetric(n, rng, 0.3);
    CHECK(spectrum_inclusion(a, b));
  }
}

TEST_CASE("rigidity gauge shapes and envelope") {
  RealVector spectrum(50);
  for (Index i = 0; i < 50; ++i)
    spectrum[i] = -2.0 + 4.0 * (i + 0.5) / 50.0;
  const RigidityGauge g = rigidity_gauge(spectrum);
  REQUIRE(g.deviations.size() == 50);
  REQUIRE(g.envelope.size() == 50);
  for (Index i = 0; i < 50; ++i) {
    CHECK(g.deviations[i] >= 0.0);
    CHECK(g.envelope[i] > 0.0);
    CHECK(std::isfinite(g.deviations[i]));
  }
  // The envelope is symmetric and smallest in the bulk center.
  CHECK(g.envelope[0] == doctest::Approx(g.envelope[49]).epsilon(1e-12));
  CHECK(g.envelope[25] < g.envelope[0]);

  RealVector unsorted(3);
  unsorted << 1.0, 0.0, 2.0;
  CHECK_THROWS_AS(rigidity_gauge(unsorted), std::invalid_argument);
}
