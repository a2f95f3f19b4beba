#pragma once

#include "rmt/types.hpp"

namespace rmt {

/// All eigenvalues in ascending order.  The input must be self-adjoint to
/// 1e-10 entrywise; smaller defects are symmetrized away before solving.
RealVector eigenvalues_sorted(const SelfAdjointMatrix& a);

/// The k_low smallest and k_high largest eigenvalues, both ascending.
/// Computed with a Lanczos iteration (full reorthogonalization, deterministic
/// start vector); small matrices and non-converged iterations fall back to
/// the dense solver, recorded in used_dense_path.
struct ExtremeEigenvalues {
  RealVector low;
  RealVector high;
  bool used_dense_path = false;
};

ExtremeEigenvalues extreme_eigenvalues(const SelfAdjointMatrix& a, Index k_low,
                                       Index k_high);

/// Two-block self-adjoint perturbation setup
///   A = [[A11, 0], [0, A22]],  B = [[0, B12], [B12*, 0]].
struct BlockPerturbation {
  ComplexMatrix a11;
  ComplexMatrix a22;
  ComplexMatrix b12;
};

/// Checks the eigenvalue stability bound for well-separated blocks: with
/// gap = dist(spec(A11), spec(A22)) and ||B|| = ||B12||_op, whenever
/// gap >= 3 ||B|| the eigenvalues of A + B near spec(A11) satisfy
///   |mu_i - lambda_i(A11)| <= ||B||^2 / (gap - 2 ||B||).
struct PerturbationReport {
  double gap = 0.0;
  double coupling_norm = 0.0;
  double bound = 0.0;            // ||B||^2 / (gap - 2 ||B||)
  RealVector a11_eigenvalues;    // ascending
  RealVector perturbed;          // the matched eigenvalues of A + B, ascending
  RealVector deviations;         // |perturbed - a11_eigenvalues|
  bool holds = false;
};

PerturbationReport perturbation_bound(const BlockPerturbation& bp);

/// Whether every eigenvalue of A + B lies within ||B||_op of the spectrum of
/// A (up to numerical slack); both matrices must be self-adjoint.
bool spectrum_inclusion(const SelfAdjointMatrix& a, const SelfAdjointMatrix& b);

/// Distances |lambda_alpha - gamma_alpha| to the classical locations together
/// with the expected envelope min(alpha, n + 1 - alpha)^(-1/3) n^(-2/3).
/// Purely diagnostic; nothing is asserted about the ratio.
struct RigidityGauge {
  RealVector deviations;
  RealVector envelope;
};

RigidityGauge rigidity_gauge(const RealVector& spectrum, double envelope_constant = 1.0);

}  // namespace rmt
