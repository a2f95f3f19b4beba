#pragma once

#include <string>
#include <vector>

#include "rmt/rng.hpp"
#include "rmt/types.hpp"

namespace rmt {

/// A standardized entry law: mean zero, unit variance, all moments finite.
/// Matrix entries are built from independent draws of this law, so the third
/// and fourth moments below fully determine the moment tensors that enter the
/// distributional corrections.
class EntryDistribution {
 public:
  enum class Kind { gaussian, rademacher, skewed_two_point, shifted_exponential, custom_table };

  static EntryDistribution gaussian();
  static EntryDistribution rademacher();

  /// Two-point law supported on {a, -1/a} with P(a) = 1 / (1 + a^2); this is
  /// automatically standardized and has third moment a - 1/a.  The parameter
  /// is the desired third moment.
  static EntryDistribution skewed_two_point(double third_moment);

  /// Exp(1) - 1: standardized, third moment 2, fourth moment 9.
  static EntryDistribution shifted_exponential();

  /// Finite table law; it is affinely standardized on construction and
  /// rejected if degenerate (zero variance) or if the probabilities are not a
  /// distribution.
  static EntryDistribution custom_table(std::vector<double> values,
                                        std::vector<double> probabilities);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double third_moment() const { return m3_; }
  double fourth_moment() const { return m4_; }

  /// One standardized draw.
  double sample(RandomStream& rng) const;

  const std::vector<double>& table_values() const { return values_; }
  const std::vector<double>& table_probabilities() const { return probabilities_; }

 private:
  EntryDistribution() = default;

  Kind kind_ = Kind::gaussian;
  std::string name_;
  double m3_ = 0.0;
  double m4_ = 3.0;
  double two_point_a_ = 1.0;        // skewed_two_point only
  std::vector<double> values_;      // custom_table only, standardized
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

/// Wigner matrix sample together with the class it was drawn from.
/// Normalisation: off-diagonal variance 1/n in both classes; diagonal
/// variance 2/n for real symmetric and 1/n for complex Hermitian; complex
/// off-diagonal entries satisfy E h_ij^2 = 0.
struct WignerMatrix {
  SelfAdjointMatrix entries;
  SymmetryClass sym = SymmetryClass::real_symmetric;

  Index n() const { return entries.n(); }
};

WignerMatrix sample_wigner(Index n, SymmetryClass sym, const EntryDistribution& law,
                           RandomStream& rng);

/// Finite-rank deformation V diag(d) V*.  Columns of V must be orthonormal,
/// d ascending with every |d_i| > 0, and all d_i inside (-sigma + 1, sigma - 1).
class Deformation {
 public:
  Deformation(ComplexMatrix v, RealVector d, double sigma = 0.0);

  const ComplexMatrix& v() const { return v_; }
  const RealVector& d() const { return d_; }
  double sigma() const { return sigma_; }
  Index n() const { return v_.rows(); }
  Index rank() const { return v_.cols(); }

  bool v_is_real() const { return v_is_real_; }
  RealMatrix v_real() const;

 private:
  ComplexMatrix v_;
  RealVector d_;
  double sigma_ = 0.0;
  bool v_is_real_ = false;
};

/// H + V diag(d) V*.  The result stays real when both parts are real.
SelfAdjointMatrix deform(const WignerMatrix& h, const Deformation& def);

/// Entry moment tensors mu3_ij = n^(3/2) E(|h_ij|^2 h_ij) and
/// mu4_ij = n^2 E|h_ij|^4, evaluated analytically from the entry law.  The
/// diagonal rows differ from the off-diagonal ones because of the diagonal
/// scaling conventions.
struct MomentTensors {
  ComplexMatrix mu3;  // real-valued when beta = 1
  RealMatrix mu4;
};

MomentTensors moment_tensors(const EntryDistribution& law, Index n, SymmetryClass sym);

/// Entrywise truncation V_ij -> V_ij 1{|V_ij| > delta}.
ComplexMatrix truncate_v(const ComplexMatrix& v, double delta);

/// Samples W* H W where W collects the rows of v_delta with a nonzero entry
/// and H is the corresponding minor of a fresh Wigner matrix.  Only the
/// k x k minor is ever drawn (k = number of support rows), which keeps the
/// cost at O(k^2 + k r^2) instead of O(n^2).  Entry scalings use the full
/// dimension n = v_delta.rows().
SelfAdjointMatrix projected_quadratic_form(const ComplexMatrix& v_delta,
                                           const EntryDistribution& law,
                                           SymmetryClass sym, RandomStream& rng);

}  // namespace rmt
