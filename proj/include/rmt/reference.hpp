#pragma once

#include <memory>
#include <vector>

#include "rmt/ensemble.hpp"
#include "rmt/gaussian.hpp"
#include "rmt/outliers.hpp"
#include "rmt/tensors.hpp"

namespace rmt {

/// Everything needed to construct the limiting law of the rescaled outliers:
/// the deformation, the entry law it will be compared against, the control
/// parameters fixing the block partition, and the entrywise truncation level
/// used for the projected Wigner part.
struct ReferenceSpec {
  Deformation deformation;
  EntryDistribution law;
  SymmetryClass sym = SymmetryClass::real_symmetric;
  ControlParams cp;
  double delta_cutoff = 0.0;  // <= 0 selects the default 1 / log(n)
  bool include_e_term = true;

  double delta() const;
};

/// Covariance tensor of the Gaussian part Psi for a single block with
/// reference strength d = d_pi (all r deformation directions as indices):
///   ((|d|+1)/d^2) Delta
///   + (|d|+1)^2 (|d|-1) [ -P(Vd* Vd)/d^4 + Q/d^5 + R/d^6 ]
///   + phi^(-1) Delta                      (the regularizing E term).
CovarianceTensor psi_covariance_single(const ReferenceSpec& spec,
                                       const std::vector<int>& block);

/// Joint covariance across all covered indices of the fine partition; entry
/// pairs that straddle blocks are zero, the Delta and E terms couple only
/// equal blocks, and the cross-block part carries the product of the
/// per-block prefactors (|d_p|-1)^(1/2) (|d_p|+1) / d_p^2.
CovarianceTensor psi_covariance_joint(const ReferenceSpec& spec);

/// One draw of the reference matrices and their eigenvalues.
struct ReferenceSample {
  std::vector<int> indices;   // covered indices, ascending
  std::vector<int> block_of;  // block position per index
  ComplexMatrix upsilon;      // block-diagonal over covered positions
  ComplexMatrix psi;
  ComplexMatrix shift;        // deterministic within-block recentering
  RescaledOutliers xi;        // eigenvalues per block, ascending
};

/// Precomputed sampler for repeated reference draws: the moment tensors, the
/// joint Gaussian factor and the per-block scale factors are built once.
class ReferenceEnsemble {
 public:
  explicit ReferenceEnsemble(const ReferenceSpec& spec);

  /// Draws the projected Wigner part from proj_rng (one draw shared by all
  /// blocks) and the Gaussian part from gauss_rng.
  ReferenceSample draw(RandomStream& proj_rng, RandomStream& gauss_rng) const;

  const Partition& partition() const { return partition_; }
  const ComplexMatrix& v_delta() const { return v_delta_; }
  const ComplexMatrix& s_matrix() const { return s_; }
  const CovarianceTensor& joint_covariance() const { return joint_; }
  const HermitianGaussianSampler& gaussian_sampler() const { return *sampler_; }
  const ReferenceSpec& spec() const { return spec_; }

 private:
  ReferenceSpec spec_;
  Partition partition_;
  std::vector<int> covered_;
  std::vector<int> block_of_;
  ComplexMatrix v_delta_;
  ComplexMatrix s_;
  CovarianceTensor joint_;
  std::shared_ptr<const HermitianGaussianSampler> sampler_;
  ComplexMatrix shift_;
  std::vector<double> d_pi_;
};

/// Deterministic part of the block reference matrix: the diagonal
/// sqrt(n) (|d_pi|-1)^(1/2) (|d_pi|+1) (1/d_pi - 1/d_i) over covered indices.
ComplexMatrix reference_shift(const ReferenceSpec& spec);

/// The random Hermitian matrix Upsilon, block-diagonal over covered indices:
///   Upsilon_pi = (|d_pi|+1) (|d_pi|-1)^(1/2)
///                [ sqrt(n) (Vd* H Vd)_pi / d_pi^2 + S(V)_pi / d_pi^4 ].
ComplexMatrix build_upsilon(const ReferenceSpec& spec, RandomStream& rng);

/// One draw of the full reference law (Upsilon, Psi, shift and eigenvalues).
ReferenceSample reference_eigenvalues(const ReferenceSpec& spec, RandomStream& rng);

}  // namespace rmt
