#pragma once

#include <vector>

#include "rmt/ensemble.hpp"
#include "rmt/types.hpp"

namespace rmt {

/// Four-index covariance tensor T_{ij,kl} = E Psi_ij Psi_kl of a self-adjoint
/// Gaussian family Psi.  Self-adjointness of Psi forces the structure
/// identity conj(T_{ij,kl}) = T_{ji,lk}; under it the pair matrix
/// O[(ij),(kl)] = T_{ij,lk} = E Psi_ij conj(Psi_kl) is Hermitian, and T is a
/// valid covariance exactly when O is positive semidefinite.
class CovarianceTensor {
 public:
  CovarianceTensor() = default;
  explicit CovarianceTensor(Index dim);

  Index dim() const { return dim_; }

  Complex& at(Index i, Index j, Index k, Index l) {
    return data_[flat(i, j, k, l)];
  }
  Complex at(Index i, Index j, Index k, Index l) const {
    return data_[flat(i, j, k, l)];
  }

  CovarianceTensor& add_scaled(Complex factor, const CovarianceTensor& other);
  CovarianceTensor& scale(Complex factor);

  /// Hermitian pair matrix O[(ij),(kl)] = T_{ij,lk}, row index i * dim + j.
  ComplexMatrix pair_matrix() const;

  /// Largest violation of the structure identity conj(T_{ij,kl}) = T_{ji,lk}.
  double structure_defect() const;

  /// Smallest eigenvalue and trace of the pair matrix.
  double min_pair_eigenvalue() const;
  double pair_trace() const;

  double max_abs() const;

 private:
  Index flat(Index i, Index j, Index k, Index l) const {
    return ((i * dim_ + j) * dim_ + k) * dim_ + l;
  }

  Index dim_ = 0;
  std::vector<Complex> data_;
};

/// Delta_{ij,kl} = delta_il delta_kj (+ delta_ik delta_jl when beta = 1);
/// the covariance tensor of the Gaussian invariant ensembles at this
/// normalisation (diagonal variance beta, off-diagonal variance 1).
CovarianceTensor tensor_delta(Index r, SymmetryClass sym);

/// P_{ij,kl}(R) = R_il R_kj (+ R_ik R_jl when beta = 1) for Hermitian R.
CovarianceTensor tensor_p(const ComplexMatrix& r_mat, SymmetryClass sym);

/// S(V) = (1/n) V* mu3 V, an r x r Hermitian matrix.
ComplexMatrix tensor_s(const ComplexMatrix& v, const MomentTensors& mt);

/// W_{ij,kl}(V) = n^(-1/2) sum_{a,b} [ conj(V_ai) conj(V_ak) V_al mu3_ab V_bj
///                                   + conj(V_ai) mu3_ab V_bj conj(V_bk) V_bl ].
/// Evaluated through the matrix products mu3 V and V* mu3, so the cost is
/// O(n^2 r + n r^4) rather than the O(n^2 r^4) of the defining quadruple sum.
CovarianceTensor tensor_w(const ComplexMatrix& v, const MomentTensors& mt);

/// Q_{ij,kl} = W_{ij,kl} + W_{kl,ij}, the third-moment correction.
CovarianceTensor tensor_q(const ComplexMatrix& v, const MomentTensors& mt);

/// R_{ij,kl}(V) = (1/n) sum_{a,b} (mu4_ab - 4 + beta)
///                conj(V_bi) V_bj conj(V_bk) V_bl,
/// the fourth-moment (excess kurtosis) correction.
CovarianceTensor tensor_r(const ComplexMatrix& v, const MomentTensors& mt,
                          SymmetryClass sym);

}  // namespace rmt
