#include "rmt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rmt {

namespace {

constexpr double kStandardizeTol = 1e-12;
constexpr double kOrthonormalTol = 1e-10;

double table_moment(const std::vector<double>& v, const std::vector<double>& p, int k) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += p[i] * std::pow(v[i], k);
  return s;
}

}  // namespace

EntryDistribution EntryDistribution::gaussian() {
  EntryDistribution d;
  d.kind_ = Kind::gaussian;
  d.name_ = "gaussian";
  d.m3_ = 0.0;
  d.m4_ = 3.0;
  return d;
}

EntryDistribution EntryDistribution::rademacher() {
  EntryDistribution d = skewed_two_point(0.0);
  d.kind_ = Kind::rademacher;
  d.name_ = "rademacher";
  return d;
}

EntryDistribution EntryDistribution::skewed_two_point(double third_moment) {
  // Solve a - 1/a = m3 for a > 0; the law puts mass 1/(1+a^2) on a and the
  // rest on -1/a, which has mean zero and unit variance identically in a.
  EntryDistribution d;
  d.kind_ = Kind::skewed_two_point;
  d.name_ = "skewed_two_point";
  const double a = 0.5 * (third_moment + std::sqrt(third_moment * third_moment + 4.0));
  d.two_point_a_ = a;
  d.m3_ = third_moment;
  d.m4_ = third_moment * third_moment + 1.0;  // x^2 = m3 x + 1 on the support
  d.values_ = {a, -1.0 / a};
  d.probabilities_ = {1.0 / (1.0 + a * a), a * a / (1.0 + a * a)};
  return d;
}

EntryDistribution EntryDistribution::shifted_exponential() {
  EntryDistribution d;
  d.kind_ = Kind::shifted_exponential;
  d.name_ = "shifted_exponential";
  d.m3_ = 2.0;
  d.m4_ = 9.0;
  return d;
}

EntryDistribution EntryDistribution::custom_table(std::vector<double> values,
                                                  std::vector<double> probabilities) {
  if (values.empty() || values.size() != probabilities.size())
    throw std::invalid_argument("custom_table: values/probabilities size mismatch");
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("custom_table: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kStandardizeTol)
    throw std::invalid_argument("custom_table: probabilities must sum to 1");

  const double mean = table_moment(values, probabilities, 1);
  for (double& v : values) v -= mean;
  const double var = table_moment(values, probabilities, 2);
  if (var <= kStandardizeTol)
    throw std::invalid_argument("custom_table: law is degenerate (zero variance)");
  const double scale = 1.0 / std::sqrt(var);
  for (double& v : values) v *= scale;

  EntryDistribution d;
  d.kind_ = Kind::custom_table;
  d.name_ = "custom_table";
  d.values_ = std::move(values);
  d.probabilities_ = std::move(probabilities);
  d.m3_ = table_moment(d.values_, d.probabilities_, 3);
  d.m4_ = table_moment(d.values_, d.probabilities_, 4);
  d.cdf_.resize(d.probabilities_.size());
  std::partial_sum(d.probabilities_.begin(), d.probabilities_.end(), d.cdf_.begin());
  d.cdf_.back() = 1.0;
  return d;
}

double EntryDistribution::sample(RandomStream& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return rng.normal();
    case Kind::rademacher:
      return (rng.next_u64() >> 63) ? 1.0 : -1.0;
    case Kind::skewed_two_point: {
      const double a = two_point_a_;
      return rng.uniform() * (1.0 + a * a) < 1.0 ? a : -1.0 / a;
    }
    case Kind::shifted_exponential:
      return -std::log(1.0 - rng.uniform()) - 1.0;
    case Kind::custom_table: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t i = std::min<std::size_t>(it - cdf_.begin(), values_.size() - 1);
      return values_[i];
    }
  }
  throw std::logic_error("EntryDistribution: unknown kind");
}

WignerMatrix sample_wigner(Index n, SymmetryClass sym, const EntryDistribution& law,
                           RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_wigner: n >= 1 required");
  const double root_n = std::sqrt(static_cast<double>(n));
  WignerMatrix w;
  w.sym = sym;
  if (sym == SymmetryClass::real_symmetric) {
    RealMatrix a(n, n);
    const double off = 1.0 / root_n;
    const double diag = std::sqrt(2.0) / root_n;
    for (Index i = 0; i < n; ++i) {
      a(i, i) = diag * law.sample(rng);
      for (Index j = i + 1; j < n; ++j) {
        const double x = off * law.sample(rng);
        a(i, j) = x;
        a(j, i) = x;
      }
    }
    w.entries = SelfAdjointMatrix(std::move(a));
  } else {
    ComplexMatrix a(n, n);
    const double off = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    const double diag = 1.0 / root_n;
    for (Index i = 0; i < n; ++i) {
      a(i, i) = Complex(diag * law.sample(rng), 0.0);
      for (Index j = i + 1; j < n; ++j) {
        const Complex x(off * law.sample(rng), off * law.sample(rng));
        a(i, j) = x;
        a(j, i) = std::conj(x);
      }
    }
    w.entries = SelfAdjointMatrix(std::move(a));
  }
  return w;
}

Deformation::Deformation(ComplexMatrix v, RealVector d, double sigma)
    : v_(std::move(v)), d_(std::move(d)) {
  const Index n = v_.rows();
  const Index r = v_.cols();
  if (r < 1 || n < r)
    throw std::invalid_argument("Deformation: need 1 <= rank <= n");
  if (d_.size() != r)
    throw std::invalid_argument("Deformation: d must have one entry per column of V");

  const ComplexMatrix gram = v_.adjoint() * v_;
  const double defect =
      (gram - ComplexMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (defect > kOrthonormalTol)
    throw std::invalid_argument("Deformation: columns of V are not orthonormal");

  double max_abs_d = 0.0;
  for (Index i = 0; i < r; ++i) {
    if (d_[i] == 0.0)
      throw std::invalid_argument("Deformation: d entries must be nonzero");
    if (i > 0 && d_[i] < d_[i - 1])
      throw std::invalid_argument("Deformation: d must be ascending");
    max_abs_d = std::max(max_abs_d, std::abs(d_[i]));
  }

  sigma_ = sigma > 0.0 ? sigma : std::max(3.0, max_abs_d + 1.0);
  // The slack absorbs the rounding of max_abs_d + 1.0 when sigma is derived.
  if (max_abs_d > sigma_ - 1.0 + 1e-12 * sigma_)
    throw std::invalid_argument("Deformation: d must lie within [-sigma + 1, sigma - 1]");

  v_is_real_ = v_.imag().cwiseAbs().maxCoeff() == 0.0;
}

RealMatrix Deformation::v_real() const {
  if (!v_is_real_) throw std::logic_error("Deformation: V has complex entries");
  return v_.real();
}

SelfAdjointMatrix deform(const WignerMatrix& h, const Deformation& def) {
  if (h.n() != def.n())
    throw std::invalid_argument("deform: dimension mismatch between H and V");
  if (h.entries.is_real() && def.v_is_real()) {
    const RealMatrix v = def.v_real();
    RealMatrix m = h.entries.real();
    m.noalias() += v * def.d().asDiagonal() * v.transpose();
    return SelfAdjointMatrix(std::move(m));
  }
  ComplexMatrix m = h.entries.to_complex();
  m.noalias() += def.v() * def.d().asDiagonal() * def.v().adjoint();
  return SelfAdjointMatrix(std::move(m));
}

MomentTensors moment_tensors(const EntryDistribution& law, Index n, SymmetryClass sym) {
  if (n < 1) throw std::invalid_argument("moment_tensors: n >= 1 required");
  const double m3 = law.third_moment();
  const double m4 = law.fourth_moment();
  MomentTensors t;
  if (sym == SymmetryClass::real_symmetric) {
    // Off-diagonal h = x / sqrt(n): mu3 = m3, mu4 = m4.
    // Diagonal h = sqrt(2) x / sqrt(n): mu3 = 2 sqrt(2) m3, mu4 = 4 m4.
    t.mu3 = ComplexMatrix::Constant(n, n, Complex(m3, 0.0));
    t.mu4 = RealMatrix::Constant(n, n, m4);
    const Complex diag3(2.0 * std::sqrt(2.0) * m3, 0.0);
    for (Index i = 0; i < n; ++i) {
      t.mu3(i, i) = diag3;
      t.mu4(i, i) = 4.0 * m4;
    }
  } else {
    // Off-diagonal h = (x + i y) / sqrt(2 n) for a < b:
    //   mu3 = E|x + i y|^2 (x + i y) / 2^(3/2) = m3 (1 + i) / (2 sqrt(2)),
    //   mu4 = E|x + i y|^4 / 4 = (2 m4 + 2) / 4 = (m4 + 1) / 2.
    // Below the diagonal h_ab = conj(h_ba), so mu3 conjugates and the matrix
    // is Hermitian.  Diagonal h = x / sqrt(n): mu3 = m3, mu4 = m4.
    const Complex off3 = m3 * Complex(1.0, 1.0) / (2.0 * std::sqrt(2.0));
    t.mu3 = ComplexMatrix::Constant(n, n, off3);
    t.mu4 = RealMatrix::Constant(n, n, 0.5 * (m4 + 1.0));
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < i; ++j) t.mu3(i, j) = std::conj(off3);
      t.mu3(i, i) = Complex(m3, 0.0);
      t.mu4(i, i) = m4;
    }
  }
  return t;
}

ComplexMatrix truncate_v(const ComplexMatrix& v, double delta) {
  if (delta < 0.0) throw std::invalid_argument("truncate_v: delta >= 0 required");
  ComplexMatrix out = v;
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i)
      if (std::abs(out(i, j)) <= delta) out(i, j) = Complex(0.0, 0.0);
  return out;
}

SelfAdjointMatrix projected_quadratic_form(const ComplexMatrix& v_delta,
                                           const EntryDistribution& law,
                                           SymmetryClass sym, RandomStream& rng) {
  const Index n = v_delta.rows();
  const Index r = v_delta.cols();
  if (n < 1) throw std::invalid_argument("projected_quadratic_form: empty matrix");

  std::vector<Index> support;
  for (Index i = 0; i < n; ++i) {
    if (v_delta.row(i).cwiseAbs().maxCoeff() > 0.0) support.push_back(i);
  }
  const Index k = static_cast<Index>(support.size());
  if (k == 0) {
    if (sym == SymmetryClass::real_symmetric)
      return SelfAdjointMatrix(RealMatrix::Zero(r, r).eval());
    return SelfAdjointMatrix(ComplexMatrix::Zero(r, r).eval());
  }

  const double root_n = std::sqrt(static_cast<double>(n));
  if (sym == SymmetryClass::real_symmetric) {
    RealMatrix minor(k, k);
    const double off = 1.0 / root_n;
    const double diag = std::sqrt(2.0) / root_n;
    for (Index a = 0; a < k; ++a) {
      minor(a, a) = diag * law.sample(rng);
      for (Index b = a + 1; b < k; ++b) {
        const double x = off * law.sample(rng);
        minor(a, b) = x;
        minor(b, a) = x;
      }
    }
    RealMatrix w(k, r);
    for (Index a = 0; a < k; ++a)
      for (Index j = 0; j < r; ++j) w(a, j) = v_delta(support[a], j).real();
    if (v_delta.imag().cwiseAbs().maxCoeff() > 0.0) {
      // Complex V with a real-symmetric minor still yields a Hermitian form.
      ComplexMatrix wc(k, r);
      for (Index a = 0; a < k; ++a) wc.row(a) = v_delta.row(support[a]);
      ComplexMatrix q = wc.adjoint() * minor.cast<Complex>() * wc;
      return SelfAdjointMatrix(std::move(q));
    }
    RealMatrix q = w.transpose() * minor * w;
    return SelfAdjointMatrix(std::move(q));
  }

  ComplexMatrix minor(k, k);
  const double off = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  const double diag = 1.0 / root_n;
  for (Index a = 0; a < k; ++a) {
    minor(a, a) = Complex(diag * law.sample(rng), 0.0);
    for (Index b = a + 1; b < k; ++b) {
      const Complex x(off * law.sample(rng), off * law.sample(rng));
      minor(a, b) = x;
      minor(b, a) = std::conj(x);
    }
  }
  ComplexMatrix w(k, r);
  for (Index a = 0; a < k; ++a) w.row(a) = v_delta.row(support[a]);
  ComplexMatrix q = w.adjoint() * minor * w;
  return SelfAdjointMatrix(std::move(q));
}

}  // namespace rmt
