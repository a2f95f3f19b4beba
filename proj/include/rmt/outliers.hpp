#pragma once

#include <vector>

#include "rmt/semicircle.hpp"
#include "rmt/types.hpp"

namespace rmt {

/// Position in the full spectrum associated with deformation strength d_i:
/// the i-th smallest eigenvalue for d_i < 0 and the (n - r + i)-th for
/// d_i > 0.  Both i and the result are 1-based.
int alpha_index(int i, const RealVector& d, Index n);

/// Whether |d_i| - 1 clears the detection threshold of the control parameters.
bool is_outlier(double d_i, const ControlParams& cp);

/// Overlap metric sqrt(n) * sqrt(|d_i| - 1) * |d_i - d_j|; requires |d_i| > 1.
/// Two outliers whose metric falls below the cutoff cannot be resolved as
/// separate fluctuating eigenvalues and are grouped into one block.
double overlap_metric(double d_i, double d_j, Index n);

/// Grouping of outlier indices into blocks of mutually overlapping strengths.
struct Partition {
  enum class Kind { fine, coarse };
  Kind kind = Kind::fine;
  double cutoff = 0.0;
  /// Blocks of 1-based indices, each ascending and consecutive; blocks are
  /// ordered by their smallest index.
  std::vector<std::vector<int>> blocks;

  /// Sorted union of all block indices.
  std::vector<int> covered() const;
  Index covered_size() const;

  bool operator==(const Partition& other) const {
    return kind == other.kind && blocks == other.blocks;
  }
};

/// Fine partition: blocks are the connected components, among indices that
/// pass the outlier threshold, of the relation "overlap metric <= s_cutoff",
/// applied with (i, j) in both orders and closed under chaining.
Partition partition_fine(const RealVector& d, const ControlParams& cp);

/// Coarse partition: same construction with the wider cutoff phi^(K/2).
Partition partition_coarse(const RealVector& d, const ControlParams& cp);

/// Reference strength of a block: min over the block of d_i.
double block_reference_d(const std::vector<int>& block, const RealVector& d);

/// Spectrum values at the alpha positions covered by a partition.  Either a
/// full ascending spectrum or just the r lowest / r highest eigenvalues is
/// enough to evaluate any alpha position.
struct PartialSpectrum {
  Index n = 0;
  RealVector low;   // ascending, positions 1 .. low.size()
  RealVector high;  // ascending, positions n - high.size() + 1 .. n

  static PartialSpectrum from_full(const RealVector& spectrum);
  double value_at(int alpha) const;  // 1-based position
};

/// Centered and rescaled outlier observations
///   zeta_i = sqrt(n) (|d_pi| - 1)^(-1/2) (mu_alpha(i) - theta(d_pi)),
/// with d_pi the reference strength of the block containing i.
struct RescaledOutliers {
  std::vector<int> indices;   // covered indices, ascending
  std::vector<int> block_of;  // position of the block in Partition::blocks
  std::vector<double> values;
};

RescaledOutliers extract_and_rescale(const PartialSpectrum& spectrum,
                                     const Partition& partition, const RealVector& d);

RescaledOutliers extract_and_rescale(const RealVector& spectrum,
                                     const Partition& partition, const RealVector& d,
                                     Index n);

}  // namespace rmt
