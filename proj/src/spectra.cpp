#include "rmt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmt/rng.hpp"
#include "rmt/semicircle.hpp"

namespace rmt {

namespace {

constexpr double kSelfAdjointTol = 1e-10;
constexpr double kLanczosTol = 1e-9;
constexpr Index kDenseCutoff = 160;    // below this a dense solve is cheaper
constexpr Index kMaxLanczosIter = 420;

template <typename Matrix>
RealVector dense_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  return solver.eigenvalues();
}

/// Lanczos with full reorthogonalization.  Returns true when the k_low
/// smallest and k_high largest Ritz values have residuals below tolerance.
template <typename Matrix>
bool lanczos_extremes(const Matrix& a, Index k_low, Index k_high, RealVector& low,
                      RealVector& high) {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Index n = a.rows();
  const Index wanted = k_low + k_high;
  const Index maxit = std::min(n, kMaxLanczosIter);

  // Deterministic pseudorandom start vector: no run-to-run variation and no
  // accidental orthogonality to structured eigenvectors.
  RandomStream rng(0xE16E5EEDull);
  Vector q(n);
  for (Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>)
      q[i] = Complex(rng.normal(), rng.normal());
    else
      q[i] = rng.normal();
  }
  q.normalize();

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis(n, maxit);
  std::vector<double> alpha, beta;
  alpha.reserve(maxit);
  beta.reserve(maxit);
  basis.col(0) = q;

  int stable_checks = 0;
  for (Index j = 0; j < maxit; ++j) {
    Vector w = a * basis.col(j);
    const double aj = std::real(Complex(basis.col(j).dot(w)));
    alpha.push_back(aj);
    w -= Scalar(aj) * basis.col(j);
    if (j > 0) w -= Scalar(beta[j - 1]) * basis.col(j - 1);
    // Two reorthogonalization sweeps keep the basis orthogonal to machine
    // precision, which is what lets near-degenerate Ritz pairs separate.
    for (int sweep = 0; sweep < 2; ++sweep) {
      auto qj = basis.leftCols(j + 1);
      w -= qj * (qj.adjoint() * w).eval();
    }
    const double bj = w.norm();
    if (bj < 1e-13) {
      // Invariant subspace found; the Ritz values are exact.
      beta.push_back(0.0);
      break;
    }
    beta.push_back(bj);
    if (j + 1 < maxit) basis.col(j + 1) = w / Scalar(bj);

    const Index m = j + 1;
    const Index interval = m < 120 ? 6 : 24;  // Ritz checks get pricier with m
    if (m < std::max<Index>(2 * wanted + 2, 8) || (m % interval != 0 && m != maxit))
      continue;

    Eigen::SelfAdjointEigenSolver<RealMatrix> tsolver;
    RealVector diag = Eigen::Map<const RealVector>(alpha.data(), m);
    RealVector sub = m > 1 ? Eigen::Map<const RealVector>(beta.data(), m - 1).eval()
                           : RealVector();
    tsolver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (tsolver.info() != Eigen::Success) continue;
    const RealVector& ritz = tsolver.eigenvalues();
    const RealMatrix& y = tsolver.eigenvectors();
    const double scale = std::max(std::abs(ritz[0]), std::abs(ritz[m - 1]));

    bool ok = m >= wanted;
    for (Index t = 0; t < k_low && ok; ++t)
      ok = bj * std::abs(y(m - 1, t)) <= kLanczosTol * scale;
    for (Index t = 0; t < k_high && ok; ++t)
      ok = bj * std::abs(y(m - 1, m - 1 - t)) <= kLanczosTol * scale;
    if (!ok) {
      stable_checks = 0;
      continue;
    }
    // Ask for two consecutive converged checks so that a Ritz value still
    // drifting towards a hidden near-degenerate partner is not accepted.
    if (++stable_checks < 2) continue;

    low = ritz.head(k_low);
    high = ritz.tail(k_high);
    return true;
  }

  // Breakdown with an exact invariant subspace also counts as convergence
  // when enough Ritz values exist.
  const Index m = static_cast<Index>(alpha.size());
  if (!beta.empty() && beta.back() == 0.0 && m >= wanted) {
    RealVector diag = Eigen::Map<const RealVector>(alpha.data(), m);
    RealVector sub = m > 1 ? Eigen::Map<const RealVector>(beta.data(), m - 1).eval()
                           : RealVector();
    Eigen::SelfAdjointEigenSolver<RealMatrix> tsolver;
    tsolver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (tsolver.info() == Eigen::Success) {
      low = tsolver.eigenvalues().head(k_low);
      high = tsolver.eigenvalues().tail(k_high);
      return true;
    }
  }
  return false;
}

double operator_norm(const ComplexMatrix& b) {
  if (b.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(b.adjoint() * b,
                                                      Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace

RealVector eigenvalues_sorted(const SelfAdjointMatrix& a) {
  if (a.n() == 0) return RealVector();
  const double defect = a.self_adjoint_defect();
  if (defect > kSelfAdjointTol)
    throw std::invalid_argument("eigenvalues_sorted: matrix is not self-adjoint");
  SelfAdjointMatrix sym = a;
  sym.symmetrize();
  return sym.is_real() ? dense_eigenvalues(sym.real()) : dense_eigenvalues(sym.complex());
}

ExtremeEigenvalues extreme_eigenvalues(const SelfAdjointMatrix& a, Index k_low,
                                       Index k_high) {
  const Index n = a.n();
  if (k_low < 0 || k_high < 0 || k_low > n || k_high > n || k_low + k_high > n)
    throw std::invalid_argument("extreme_eigenvalues: invalid counts");

  ExtremeEigenvalues out;
  if (k_low + k_high == 0) return out;

  if (n > kDenseCutoff && k_low + k_high < n / 4) {
    SelfAdjointMatrix sym = a;
    if (sym.self_adjoint_defect() > kSelfAdjointTol)
      throw std::invalid_argument("extreme_eigenvalues: matrix is not self-adjoint");
    sym.symmetrize();
    const bool converged =
        sym.is_real() ? lanczos_extremes(sym.real(), k_low, k_high, out.low, out.high)
                      : lanczos_extremes(sym.complex(), k_low, k_high, out.low, out.high);
    if (converged) return out;
  }

  const RealVector all = eigenvalues_sorted(a);
  out.low = all.head(k_low);
  out.high = all.tail(k_high);
  out.used_dense_path = true;
  return out;
}

PerturbationReport perturbation_bound(const BlockPerturbation& bp) {
  const Index n1 = bp.a11.rows();
  const Index n2 = bp.a22.rows();
  if (n1 < 1 || n2 < 1 || bp.a11.cols() != n1 || bp.a22.cols() != n2)
    throw std::invalid_argument("perturbation_bound: blocks must be square");
  if (bp.b12.rows() != n1 || bp.b12.cols() != n2)
    throw std::invalid_argument("perturbation_bound: B12 shape mismatch");

  PerturbationReport rep;
  rep.a11_eigenvalues = eigenvalues_sorted(SelfAdjointMatrix(bp.a11));
  const RealVector lam2 = eigenvalues_sorted(SelfAdjointMatrix(bp.a22));
  rep.coupling_norm = operator_norm(bp.b12);

  rep.gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      rep.gap = std::min(rep.gap, std::abs(rep.a11_eigenvalues[i] - lam2[j]));

  if (rep.gap < 3.0 * rep.coupling_norm)
    throw std::invalid_argument(
        "perturbation_bound: separation requires gap >= 3 ||B||");

  ComplexMatrix full = ComplexMatrix::Zero(n1 + n2, n1 + n2);
  full.topLeftCorner(n1, n1) = bp.a11;
  full.bottomRightCorner(n2, n2) = bp.a22;
  full.topRightCorner(n1, n2) = bp.b12;
  full.bottomLeftCorner(n2, n1) = bp.b12.adjoint();
  const RealVector mu = eigenvalues_sorted(SelfAdjointMatrix(std::move(full)));

  // The perturbed eigenvalues attached to the A11 block are those inside the
  // 2 ||B|| neighbourhood of spec(A11); separation makes this unambiguous.
  std::vector<double> near;
  for (Index k = 0; k < mu.size(); ++k) {
    double dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n1; ++i)
      dist = std::min(dist, std::abs(mu[k] - rep.a11_eigenvalues[i]));
    if (dist <= 2.0 * rep.coupling_norm + 1e-12) near.push_back(mu[k]);
  }
  if (static_cast<Index>(near.size()) != n1)
    throw std::runtime_error("perturbation_bound: eigenvalue matching failed");

  rep.perturbed = Eigen::Map<const RealVector>(near.data(), n1);
  rep.deviations = (rep.perturbed - rep.a11_eigenvalues).cwiseAbs();
  rep.bound = rep.coupling_norm == 0.0
                  ? 0.0
                  : rep.coupling_norm * rep.coupling_norm /
                        (rep.gap - 2.0 * rep.coupling_norm);
  rep.holds = (rep.deviations.array() <= rep.bound + 1e-11).all();
  return rep;
}

bool spectrum_inclusion(const SelfAdjointMatrix& a, const SelfAdjointMatrix& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("spectrum_inclusion: dimension mismatch");
  if (a.n() == 0) return true;
  const RealVector spec_a = eigenvalues_sorted(a);
  const RealVector spec_b = eigenvalues_sorted(b);
  const double norm_b =
      spec_b.size() == 0 ? 0.0 : spec_b.cwiseAbs().maxCoeff();

  SelfAdjointMatrix sum = a.is_real() && b.is_real()
                              ? SelfAdjointMatrix((a.real() + b.real()).eval())
                              : SelfAdjointMatrix((a.to_complex() + b.to_complex()).eval());
  const RealVector spec_sum = eigenvalues_sorted(sum);

  const double scale = std::max({1.0, spec_a.cwiseAbs().maxCoeff(), norm_b});
  const double slack = 1e-9 * scale;
  for (Index k = 0; k < spec_sum.size(); ++k) {
    double dist = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < spec_a.size(); ++i)
      dist = std::min(dist, std::abs(spec_sum[k] - spec_a[i]));
    if (dist > norm_b + slack) return false;
  }
  return true;
}

RigidityGauge rigidity_gauge(const RealVector& spectrum, double envelope_constant) {
  const Index n = spectrum.size();
  if (n < 1) throw std::invalid_argument("rigidity_gauge: empty spectrum");
  for (Index i = 1; i < n; ++i)
    if (spectrum[i] < spectrum[i - 1])
      throw std::invalid_argument("rigidity_gauge: spectrum must be ascending");

  const RealVector gamma = classical_locations(n);
  RigidityGauge g;
  g.deviations = (spectrum - gamma).cwiseAbs();
  g.envelope.resize(n);
  const double n23 = std::pow(static_cast<double>(n), -2.0 / 3.0);
  for (Index a = 1; a <= n; ++a) {
    const double rank = std::min<double>(a, static_cast<double>(n) + 1.0 - a);
    g.envelope[a - 1] = envelope_constant * std::pow(rank, -1.0 / 3.0) * n23;
  }
  return g;
}

}  // namespace rmt
