#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

namespace rmt {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Symmetry class of the random matrix ensemble.  The real symmetric class
/// has beta = 1 (GOE-like normalisation), the complex Hermitian class beta = 2.
enum class SymmetryClass { real_symmetric, complex_hermitian };

inline int beta(SymmetryClass c) {
  return c == SymmetryClass::real_symmetric ? 1 : 2;
}

/// A square self-adjoint matrix that is stored as real symmetric or complex
/// Hermitian depending on the symmetry class it came from.  Keeping the real
/// case in a real matrix roughly halves memory traffic in the hot paths.
class SelfAdjointMatrix {
 public:
  SelfAdjointMatrix() : m_(RealMatrix()) {}
  SelfAdjointMatrix(RealMatrix m) : m_(std::move(m)) {}
  SelfAdjointMatrix(ComplexMatrix m) : m_(std::move(m)) {}

  bool is_real() const { return std::holds_alternative<RealMatrix>(m_); }

  Index n() const {
    return is_real() ? std::get<RealMatrix>(m_).rows()
                     : std::get<ComplexMatrix>(m_).rows();
  }

  const RealMatrix& real() const {
    if (!is_real()) throw std::logic_error("SelfAdjointMatrix: stored as complex");
    return std::get<RealMatrix>(m_);
  }

  const ComplexMatrix& complex() const {
    if (is_real()) throw std::logic_error("SelfAdjointMatrix: stored as real");
    return std::get<ComplexMatrix>(m_);
  }

  RealMatrix& real() {
    if (!is_real()) throw std::logic_error("SelfAdjointMatrix: stored as complex");
    return std::get<RealMatrix>(m_);
  }

  ComplexMatrix& complex() {
    if (is_real()) throw std::logic_error("SelfAdjointMatrix: stored as real");
    return std::get<ComplexMatrix>(m_);
  }

  /// Widening accessor for code paths that do not care about the storage type.
  ComplexMatrix to_complex() const {
    return is_real() ? std::get<RealMatrix>(m_).cast<Complex>().eval()
                     : std::get<ComplexMatrix>(m_);
  }

  /// Largest entrywise deviation from self-adjointness, |A - A*|_max.
  double self_adjoint_defect() const {
    if (is_real()) {
      const RealMatrix& a = std::get<RealMatrix>(m_);
      return a.rows() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
    }
    const ComplexMatrix& a = std::get<ComplexMatrix>(m_);
    return a.rows() == 0 ? 0.0 : (a - a.adjoint()).cwiseAbs().maxCoeff();
  }

  /// Replaces A by (A + A*) / 2.
  void symmetrize() {
    if (is_real()) {
      RealMatrix& a = std::get<RealMatrix>(m_);
      a = 0.5 * (a + a.transpose()).eval();
    } else {
      ComplexMatrix& a = std::get<ComplexMatrix>(m_);
      a = 0.5 * (a + a.adjoint()).eval();
    }
  }

 private:
  std::variant<RealMatrix, ComplexMatrix> m_;
};

}  // namespace rmt
