#include "rmt/tensors.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rmt {

CovarianceTensor::CovarianceTensor(Index dim) : dim_(dim) {
  if (dim < 0) throw std::invalid_argument("CovarianceTensor: negative dimension");
  data_.assign(static_cast<std::size_t>(dim) * dim * dim * dim, Complex(0.0, 0.0));
}

CovarianceTensor& CovarianceTensor::add_scaled(Complex factor,
                                               const CovarianceTensor& other) {
  if (other.dim_ != dim_)
    throw std::invalid_argument("CovarianceTensor: dimension mismatch");
  for (std::size_t t = 0; t < data_.size(); ++t) data_[t] += factor * other.data_[t];
  return *this;
}

CovarianceTensor& CovarianceTensor::scale(Complex factor) {
  for (auto& x : data_) x *= factor;
  return *this;
}

ComplexMatrix CovarianceTensor::pair_matrix() const {
  ComplexMatrix o(dim_ * dim_, dim_ * dim_);
  for (Index i = 0; i < dim_; ++i)
    for (Index j = 0; j < dim_; ++j)
      for (Index k = 0; k < dim_; ++k)
        for (Index l = 0; l < dim_; ++l) o(i * dim_ + j, k * dim_ + l) = at(i, j, l, k);
  return o;
}

double CovarianceTensor::structure_defect() const {
  double worst = 0.0;
  for (Index i = 0; i < dim_; ++i)
    for (Index j = 0; j < dim_; ++j)
      for (Index k = 0; k < dim_; ++k)
        for (Index l = 0; l < dim_; ++l)
          worst = std::max(worst,
                           std::abs(std::conj(at(i, j, k, l)) - at(j, i, l, k)));
  return worst;
}

double CovarianceTensor::min_pair_eigenvalue() const {
  if (dim_ == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(pair_matrix(),
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double CovarianceTensor::pair_trace() const {
  double tr = 0.0;
  for (Index i = 0; i < dim_; ++i)
    for (Index j = 0; j < dim_; ++j) tr += at(i, j, j, i).real();
  return tr;
}

double CovarianceTensor::max_abs() const {
  double worst = 0.0;
  for (const auto& x : data_) worst = std::max(worst, std::abs(x));
  return worst;
}

CovarianceTensor tensor_delta(Index r, SymmetryClass sym) {
  CovarianceTensor t(r);
  const bool real_class = sym == SymmetryClass::real_symmetric;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) {
      t.at(i, j, j, i) += 1.0;
      if (real_class) t.at(i, j, i, j) += 1.0;
    }
  return t;
}

CovarianceTensor tensor_p(const ComplexMatrix& r_mat, SymmetryClass sym) {
  const Index r = r_mat.rows();
  if (r_mat.cols() != r) throw std::invalid_argument("tensor_p: R must be square");
  CovarianceTensor t(r);
  const bool real_class = sym == SymmetryClass::real_symmetric;
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          Complex val = r_mat(i, l) * r_mat(k, j);
          if (real_class) val += r_mat(i, k) * r_mat(j, l);
          t.at(i, j, k, l) = val;
        }
  return t;
}

ComplexMatrix tensor_s(const ComplexMatrix& v, const MomentTensors& mt) {
  const Index n = v.rows();
  if (mt.mu3.rows() != n)
    throw std::invalid_argument("tensor_s: moment tensor size mismatch");
  return (v.adjoint() * mt.mu3 * v) / static_cast<double>(n);
}

CovarianceTensor tensor_w(const ComplexMatrix& v, const MomentTensors& mt) {
  const Index n = v.rows();
  const Index r = v.cols();
  if (mt.mu3.rows() != n)
    throw std::invalid_argument("tensor_w: moment tensor size mismatch");

  const ComplexMatrix p = mt.mu3 * v;            // p(a, j) = sum_b mu3_ab V_bj
  const ComplexMatrix q = v.adjoint() * mt.mu3;  // q(i, b) = sum_a conj(V_ai) mu3_ab
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  CovarianceTensor t(r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          Complex sum(0.0, 0.0);
          for (Index a = 0; a < n; ++a)
            sum += std::conj(v(a, i)) * std::conj(v(a, k)) * v(a, l) * p(a, j);
          for (Index b = 0; b < n; ++b)
            sum += q(i, b) * v(b, j) * std::conj(v(b, k)) * v(b, l);
          t.at(i, j, k, l) = scale * sum;
        }
  return t;
}

CovarianceTensor tensor_q(const ComplexMatrix& v, const MomentTensors& mt) {
  const CovarianceTensor w = tensor_w(v, mt);
  const Index r = v.cols();
  CovarianceTensor t(r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l)
          t.at(i, j, k, l) = w.at(i, j, k, l) + w.at(k, l, i, j);
  return t;
}

CovarianceTensor tensor_r(const ComplexMatrix& v, const MomentTensors& mt,
                          SymmetryClass sym) {
  const Index n = v.rows();
  const Index r = v.cols();
  if (mt.mu4.rows() != n)
    throw std::invalid_argument("tensor_r: moment tensor size mismatch");

  const double shift = 4.0 - static_cast<double>(beta(sym));
  RealVector c(n);  // c_b = sum_a (mu4_ab - 4 + beta)
  for (Index b = 0; b < n; ++b) c[b] = mt.mu4.col(b).sum() - shift * n;

  CovarianceTensor t(r);
  const double scale = 1.0 / static_cast<double>(n);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          Complex sum(0.0, 0.0);
          for (Index b = 0; b < n; ++b)
            sum += c[b] * std::conj(v(b, i)) * v(b, j) * std::conj(v(b, k)) * v(b, l);
          t.at(i, j, k, l) = scale * sum;
        }
  return t;
}

}  // namespace rmt
