#pragma once

#include "rmt/rng.hpp"
#include "rmt/tensors.hpp"
#include "rmt/types.hpp"

namespace rmt {

/// Draws self-adjoint Gaussian matrices with a prescribed covariance tensor
/// T_{ij,kl} = E Psi_ij Psi_kl.  The tensor is translated into a real
/// covariance over the free coordinates of the matrix (diagonal entries, and
/// real/imaginary parts of the upper triangle in the Hermitian class), which
/// is then factorized once by eigendecomposition.
///
/// Eigenvalues of the coordinate covariance in [-1e-10 * trace, 0) are
/// clipped to zero, anything below that is rejected as an invalid covariance.
class HermitianGaussianSampler {
 public:
  HermitianGaussianSampler(const CovarianceTensor& cov, SymmetryClass sym);

  SelfAdjointMatrix sample(RandomStream& rng) const;

  Index dim() const { return r_; }
  int clipped_modes() const { return clipped_modes_; }
  double clip_magnitude() const { return clip_magnitude_; }

 private:
  Index r_ = 0;
  SymmetryClass sym_ = SymmetryClass::real_symmetric;
  RealMatrix factor_;  // coordinate factor L with L L^T = coordinate covariance
  int clipped_modes_ = 0;
  double clip_magnitude_ = 0.0;
};

/// One-shot draw from the covariance tensor.
SelfAdjointMatrix sample_hermitian_gaussian(const CovarianceTensor& cov,
                                            SymmetryClass sym, RandomStream& rng);

}  // namespace rmt
