#include "rmt/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace rmt {

namespace {

constexpr double kStructureTol = 1e-8;
constexpr double kClipRelative = 1e-10;

struct Coordinate {
  Index i, j;
  bool imaginary;  // imaginary part of entry (i, j), only for i < j, beta = 2
};

std::vector<Coordinate> coordinate_list(Index r, SymmetryClass sym) {
  std::vector<Coordinate> coords;
  for (Index i = 0; i < r; ++i) coords.push_back({i, i, false});
  for (Index i = 0; i < r; ++i)
    for (Index j = i + 1; j < r; ++j) {
      coords.push_back({i, j, false});
      if (sym == SymmetryClass::complex_hermitian) coords.push_back({i, j, true});
    }
  return coords;
}

/// Covariance of the real coordinates.  With S = E Psi_ij Psi_kl and
/// H = E Psi_ij conj(Psi_kl), writing Psi_ij = A + iB and Psi_kl = C + iD:
///   E AC = (Re H + Re S) / 2,   E BD = (Re H - Re S) / 2,
///   E AD = (Im S - Im H) / 2,   E BC = (Im S + Im H) / 2.
RealMatrix coordinate_covariance(const CovarianceTensor& t, SymmetryClass sym,
                                 const std::vector<Coordinate>& coords) {
  const Index m = static_cast<Index>(coords.size());
  RealMatrix c(m, m);
  for (Index p = 0; p < m; ++p) {
    for (Index q = 0; q < m; ++q) {
      const auto& a = coords[p];
      const auto& b = coords[q];
      const Complex s = t.at(a.i, a.j, b.i, b.j);
      const Complex h = t.at(a.i, a.j, b.j, b.i);
      double value;
      if (!a.imaginary && !b.imaginary)
        value = 0.5 * (h.real() + s.real());
      else if (a.imaginary && b.imaginary)
        value = 0.5 * (h.real() - s.real());
      else if (!a.imaginary && b.imaginary)
        value = 0.5 * (s.imag() - h.imag());
      else
        value = 0.5 * (s.imag() + h.imag());
      c(p, q) = value;
    }
  }
  return c;
}

}  // namespace

HermitianGaussianSampler::HermitianGaussianSampler(const CovarianceTensor& cov,
                                                   SymmetryClass sym)
    : r_(cov.dim()), sym_(sym) {
  const double scale = std::max(cov.max_abs(), 1e-300);
  if (cov.structure_defect() > kStructureTol * scale)
    throw std::invalid_argument(
        "HermitianGaussianSampler: tensor violates the self-adjoint structure "
        "identity conj(T_ijkl) = T_jilk");

  if (sym == SymmetryClass::real_symmetric) {
    // A real symmetric target must have a real tensor.
    double imag_max = 0.0;
    for (Index i = 0; i < r_; ++i)
      for (Index j = 0; j < r_; ++j)
        for (Index k = 0; k < r_; ++k)
          for (Index l = 0; l < r_; ++l)
            imag_max = std::max(imag_max, std::abs(cov.at(i, j, k, l).imag()));
    if (imag_max > kStructureTol * scale)
      throw std::invalid_argument(
          "HermitianGaussianSampler: complex tensor for the real class");
  }

  const auto coords = coordinate_list(r_, sym);
  RealMatrix c = coordinate_covariance(cov, sym, coords);
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(c);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("HermitianGaussianSampler: factorization failed");

  // Tolerance relative to the trace, plus an absolute epsilon so that an
  // exactly-zero covariance does not trip on rounding noise.
  const double floor = -kClipRelative * std::max(c.trace(), 0.0) -
                       1e-13 * std::max(1.0, c.cwiseAbs().maxCoeff());
  RealVector lambda = solver.eigenvalues();
  for (Index k = 0; k < lambda.size(); ++k) {
    if (lambda[k] < floor)
      throw std::runtime_error(
          "HermitianGaussianSampler: covariance is indefinite beyond tolerance "
          "(min eigenvalue " +
          std::to_string(lambda[k]) + ")");
    if (lambda[k] < 0.0) {
      ++clipped_modes_;
      clip_magnitude_ = std::max(clip_magnitude_, -lambda[k]);
      lambda[k] = 0.0;
    }
  }
  factor_ = solver.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

SelfAdjointMatrix HermitianGaussianSampler::sample(RandomStream& rng) const {
  const auto coords = coordinate_list(r_, sym_);
  RealVector g(factor_.cols());
  for (Index k = 0; k < g.size(); ++k) g[k] = rng.normal();
  const RealVector x = factor_ * g;

  if (sym_ == SymmetryClass::real_symmetric) {
    RealMatrix out = RealMatrix::Zero(r_, r_);
    for (std::size_t p = 0; p < coords.size(); ++p) {
      const auto& c = coords[p];
      out(c.i, c.j) = out(c.j, c.i) = x[static_cast<Index>(p)];
    }
    return SelfAdjointMatrix(std::move(out));
  }

  ComplexMatrix out = ComplexMatrix::Zero(r_, r_);
  for (std::size_t p = 0; p < coords.size(); ++p) {
    const auto& c = coords[p];
    const double v = x[static_cast<Index>(p)];
    if (c.i == c.j)
      out(c.i, c.i) += Complex(v, 0.0);
    else if (!c.imaginary)
      out(c.i, c.j) += Complex(v, 0.0);
    else
      out(c.i, c.j) += Complex(0.0, v);
  }
  for (Index i = 0; i < r_; ++i)
    for (Index j = i + 1; j < r_; ++j) out(j, i) = std::conj(out(i, j));
  return SelfAdjointMatrix(std::move(out));
}

SelfAdjointMatrix sample_hermitian_gaussian(const CovarianceTensor& cov,
                                            SymmetryClass sym, RandomStream& rng) {
  HermitianGaussianSampler sampler(cov, sym);
  return sampler.sample(rng);
}

}  // namespace rmt
