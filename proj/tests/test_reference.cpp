#include <cmath>
#include <vector>

#include "doctest.h"
#include "rmt/gaussian.hpp"
#include "rmt/reference.hpp"
#include "rmt/semicircle.hpp"

using namespace rmt;

namespace {

ReferenceSpec spec_for(Deformation def, EntryDistribution law, SymmetryClass sym,
                       double delta = 0.0, bool include_e = true) {
  ReferenceSpec spec{std::move(def), std::move(law), sym};
  spec.cp.n = spec.deformation.n();
  spec.delta_cutoff = delta;
  spec.include_e_term = include_e;
  return spec;
}

ComplexMatrix basis(Index n, std::initializer_list<Index> cols) {
  ComplexMatrix v = ComplexMatrix::Zero(n, static_cast<Index>(cols.size()));
  Index j = 0;
  for (Index c : cols) v(c, j++) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("truncation level must dominate 1/phi and stay below 1") {
  ComplexMatrix v = basis(1000, {0});
  RealVector d(1);
  d << 2.0;
  const ReferenceSpec spec = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::real_symmetric);
  CHECK(spec.delta() == doctest::Approx(1.0 / std::log(1000.0)).epsilon(1e-13));
  CHECK(spec.delta() >= 1.0 / control_parameter(1000));

  // At small n the default 1/log(n) falls below 1/phi(n) and is rejected.
  ComplexMatrix v10 = basis(10, {0});
  const ReferenceSpec small = spec_for(Deformation(v10, d), EntryDistribution::gaussian(),
                                       SymmetryClass::real_symmetric);
  CHECK_THROWS_AS(small.delta(), std::invalid_argument);
  const ReferenceSpec fixed = spec_for(Deformation(v10, d), EntryDistribution::gaussian(),
                                       SymmetryClass::real_symmetric, 0.6);
  CHECK(fixed.delta() == doctest::Approx(0.6));
}

TEST_CASE("pairing tensor at the identity reduces to the base tensor") {
  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const Index r = 3;
    const CovarianceTensor delta = tensor_delta(r, sym);
    const CovarianceTensor p = tensor_p(ComplexMatrix::Identity(r, r), sym);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        for (Index k = 0; k < r; ++k)
          for (Index l = 0; l < r; ++l)
            CHECK(std::abs(p.at(i, j, k, l) - delta.at(i, j, k, l)) == 0.0);
  }
}

TEST_CASE("q tensor is w plus its index swap and keeps the structure identity") {
  RandomStream rng(606);
  const EntryDistribution law = EntryDistribution::shifted_exponential();
  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const Index n = 80, r = 2;
    ComplexMatrix g(n, r);
    const bool real = sym == SymmetryClass::real_symmetric;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < r; ++j)
        g(i, j) = real ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix v = qr.householderQ() * ComplexMatrix::Identity(n, r);

    const MomentTensors mt = moment_tensors(law, n, sym);
    const CovarianceTensor w = tensor_w(v, mt);
    const CovarianceTensor q = tensor_q(v, mt);
    double worst = 0.0;
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < r; ++j)
        for (Index k = 0; k < r; ++k)
          for (Index l = 0; l < r; ++l)
            worst = std::max(worst, std::abs(q.at(i, j, k, l) - w.at(i, j, k, l) -
                                             w.at(k, l, i, j)));
    CHECK(worst <= 1e-12);
    CHECK(q.structure_defect() <= 1e-12);
    CHECK(w.structure_defect() <= 1e-12);
    CHECK(tensor_r(v, mt, sym).structure_defect() <= 1e-12);
  }
}

TEST_CASE("single-block covariance of the delocalized gaussian configuration") {
  const Index n = 1000;
  RealVector d(1);
  d << 2.0;
  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    ComplexMatrix v = ComplexMatrix::Constant(
        n, 1, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    const ReferenceSpec spec =
        spec_for(Deformation(v, d), EntryDistribution::gaussian(), sym);
    const CovarianceTensor cov = psi_covariance_single(spec, {1});
    REQUIRE(cov.dim() == 1);
    const double delta_entry = sym == SymmetryClass::real_symmetric ? 2.0 : 1.0;
    const double want = delta_entry * (0.75 + 1.0 / control_parameter(n));
    CHECK(cov.at(0, 0, 0, 0).real() == doctest::Approx(want).epsilon(1e-4));
    CHECK(std::abs(cov.at(0, 0, 0, 0).imag()) < 1e-15);
    CHECK(cov.structure_defect() <= 1e-13);
    CHECK(cov.min_pair_eigenvalue() >= -1e-12);
  }
}

TEST_CASE("dropping the floor term shifts the covariance by exactly 1/phi") {
  const Index n = 1000;
  ComplexMatrix v = basis(n, {0});
  RealVector d(1);
  d << 2.0;
  const ReferenceSpec with_e = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                        SymmetryClass::complex_hermitian, 0.0, true);
  const ReferenceSpec no_e = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::complex_hermitian, 0.0, false);
  const double a = psi_covariance_single(with_e, {1}).at(0, 0, 0, 0).real();
  const double b = psi_covariance_single(no_e, {1}).at(0, 0, 0, 0).real();
  CHECK(a - b == doctest::Approx(1.0 / control_parameter(n)).epsilon(1e-12));
}

TEST_CASE("joint covariance decouples distinct blocks") {
  const Index n = 1000;
  ComplexMatrix v = basis(n, {0, 1});
  RealVector d(2);
  d << -2.0, 2.0;
  const ReferenceSpec spec = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::complex_hermitian);
  const CovarianceTensor joint = psi_covariance_joint(spec);
  REQUIRE(joint.dim() == 2);
  CHECK(joint.structure_defect() <= 1e-13);

  // Any entry touching both blocks vanishes; the diagonal blocks agree with
  // the single-block construction.
  double straddle = 0.0;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index k = 0; k < 2; ++k)
        for (Index l = 0; l < 2; ++l) {
          const bool pure = i == j && j == k && k == l;
          if (!pure) straddle = std::max(straddle, std::abs(joint.at(i, j, k, l)));
        }
  CHECK(straddle <= 1e-15);

  const double c1 = psi_covariance_single(spec, {1}).at(0, 0, 0, 0).real();
  const double c2 = psi_covariance_single(spec, {2}).at(0, 0, 0, 0).real();
  CHECK(joint.at(0, 0, 0, 0).real() == doctest::Approx(c1).epsilon(1e-12));
  CHECK(joint.at(1, 1, 1, 1).real() == doctest::Approx(c2).epsilon(1e-12));
}

TEST_CASE("fluctuation corrections wash out at the weak-strength boundary") {
  const Index n = 1000;
  ComplexMatrix v = basis(n, {0});
  for (double eps : {0.05, 0.02, 0.01}) {
    RealVector d(1);
    d << 1.0 + eps;
    const ReferenceSpec spec = spec_for(Deformation(v, d),
                                        EntryDistribution::skewed_two_point(2.0),
                                        SymmetryClass::real_symmetric);
    const double entry = psi_covariance_single(spec, {1}).at(0, 0, 0, 0).real();
    const double base =
        2.0 * ((d[0] + 1.0) / (d[0] * d[0]) + 1.0 / control_parameter(n));
    CHECK(std::abs(entry - base) <= 40.0 * eps);
  }
}

TEST_CASE("upsilon is deterministic for a delocalized direction") {
  const Index n = 1000;
  const double m3 = 2.0, dval = 2.0;
  ComplexMatrix v = ComplexMatrix::Constant(
      n, 1, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  RealVector d(1);
  d << dval;
  const ReferenceSpec spec = spec_for(Deformation(v, d),
                                      EntryDistribution::skewed_two_point(m3),
                                      SymmetryClass::real_symmetric);
  const double s_entry = m3 * (1.0 + (2.0 * std::sqrt(2.0) - 1.0) / n);
  const double want = (dval + 1.0) * std::sqrt(dval - 1.0) * s_entry / std::pow(dval, 4.0);

  RandomStream rng = RandomStream::derive(1, 0, stream_purpose::reference_projection);
  const ComplexMatrix u1 = build_upsilon(spec, rng);
  RandomStream rng2 = RandomStream::derive(2, 0, stream_purpose::reference_projection);
  const ComplexMatrix u2 = build_upsilon(spec, rng2);
  REQUIRE(u1.rows() == 1);
  CHECK(u1(0, 0).real() == doctest::Approx(want).epsilon(1e-12));
  CHECK(std::abs(u1(0, 0) - u2(0, 0)) == 0.0);  // no random part survives truncation
}

TEST_CASE("upsilon variance for a spiked direction matches the projection") {
  const Index n = 1000;
  ComplexMatrix v = basis(n, {0});
  RealVector d(1);
  d << 2.0;
  const ReferenceSpec spec = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::real_symmetric);
  // Upsilon = 3 [ sqrt(n) h_11 / 4 ]: variance (9/16) * 2 for the real class.
  RandomStream rng = RandomStream::derive(99, 0, stream_purpose::reference_projection);
  const int reps = 20000;
  double s1 = 0.0, s2 = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const double u = build_upsilon(spec, rng)(0, 0).real();
    s1 += u;
    s2 += u * u;
  }
  const double mean = s1 / reps;
  const double var = s2 / reps - mean * mean;
  const double want = 9.0 / 16.0 * 2.0;
  CHECK(std::abs(mean) < 5.0 * std::sqrt(want / reps));
  CHECK(std::abs(var - want) < 5.0 * want * std::sqrt(2.0 / reps));
}

TEST_CASE("shift recenters within a block relative to its reference strength") {
  const Index n = 10000;
  ComplexMatrix v = basis(n, {0, 1, 2});
  RealVector d(3);
  d << 1.5, 1.6, 1.7;
  const ReferenceSpec spec = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::real_symmetric);
  const ComplexMatrix shift = reference_shift(spec);
  REQUIRE(shift.rows() == 3);
  const double pref = std::sqrt(static_cast<double>(n)) * std::sqrt(0.5) * 2.5;
  CHECK(std::abs(shift(0, 0)) < 1e-12);
  CHECK(shift(1, 1).real() ==
        doctest::Approx(pref * (1.0 / 1.5 - 1.0 / 1.6)).epsilon(1e-12));
  CHECK(shift(2, 2).real() ==
        doctest::Approx(pref * (1.0 / 1.5 - 1.0 / 1.7)).epsilon(1e-12));
  CHECK(std::abs(shift(0, 1)) + std::abs(shift(1, 2)) + std::abs(shift(0, 2)) == 0.0);
}

TEST_CASE("reference draws are reproducible and sorted per block") {
  const Index n = 10000;
  ComplexMatrix v = basis(n, {0, 1, 2});
  RealVector d(3);
  d << 1.5, 1.6, 1.7;
  const ReferenceSpec spec = spec_for(Deformation(v, d), EntryDistribution::gaussian(),
                                      SymmetryClass::real_symmetric);
  const ReferenceEnsemble ensemble(spec);
  REQUIRE(ensemble.partition().blocks.size() == 1);

  RandomStream p1 = RandomStream::derive(5, 1, stream_purpose::reference_projection);
  RandomStream g1 = RandomStream::derive(5, 1, stream_purpose::reference_gaussian);
  const ReferenceSample a = ensemble.draw(p1, g1);
  RandomStream p2 = RandomStream::derive(5, 1, stream_purpose::reference_projection);
  RandomStream g2 = RandomStream::derive(5, 1, stream_purpose::reference_gaussian);
  const ReferenceSample b = ensemble.draw(p2, g2);

  REQUIRE(a.xi.values.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.xi.values[i] == b.xi.values[i]);
  CHECK(a.xi.values[0] <= a.xi.values[1]);
  CHECK(a.xi.values[1] <= a.xi.values[2]);
  CHECK((a.upsilon - a.upsilon.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.psi - a.psi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gaussian sampler reproduces a prescribed tensor") {
  const CovarianceTensor delta = tensor_delta(2, SymmetryClass::complex_hermitian);
  const HermitianGaussianSampler sampler(delta, SymmetryClass::complex_hermitian);
  CHECK(sampler.clipped_modes() == 0);
  RandomStream rng(31);
  const int reps = 30000;
  double v11 = 0.0, v12 = 0.0, cross = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const ComplexMatrix s = sampler.sample(rng).to_complex();
    v11 += s(0, 0).real() * s(0, 0).real();
    v12 += std::norm(s(0, 1));
    cross += s(0, 0).real() * s(1, 1).real();
  }
  CHECK(std::abs(v11 / reps - 1.0) < 0.05);
  CHECK(std::abs(v12 / reps - 1.0) < 0.05);
  CHECK(std::abs(cross / reps) < 0.05);

  CovarianceTensor bad = delta;
  bad.scale(-1.0);
  CHECK_THROWS_AS(HermitianGaussianSampler(bad, SymmetryClass::complex_hermitian),
                  std::runtime_error);
}
