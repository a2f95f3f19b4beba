#include "rmt/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rmt/ensemble.hpp"
#include "rmt/gaussian.hpp"
#include "rmt/outliers.hpp"
#include "rmt/reference.hpp"
#include "rmt/rng.hpp"
#include "rmt/semicircle.hpp"
#include "rmt/spectra.hpp"
#include "rmt/tensors.hpp"
#include "rmt/types.hpp"

namespace rmt::checks {
namespace {

constexpr std::uint64_t kSuitePurpose = 0x434845434BULL;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

/// Collects assertions of one suite; the first few failures are kept verbatim.
struct Ctx {
  RandomStream rng;
  int assertions = 0;
  std::vector<std::string> failures;

  explicit Ctx(RandomStream stream) : rng(stream) {}

  void expect(bool ok, const std::string& what) {
    ++assertions;
    if (!ok && failures.size() < 4) failures.push_back(what);
    if (!ok && failures.size() == 4) failures.push_back("...");
  }

  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol,
           what + ": got " + fmt(got) + ", want " + fmt(want) + " (tol " + fmt(tol) + ")");
  }

  template <typename Fn>
  void throws(Fn&& fn, const std::string& what) {
    ++assertions;
    bool thrown = false;
    try {
      fn();
    } catch (const std::exception&) {
      thrown = true;
    }
    if (!thrown && failures.size() < 4) failures.push_back(what + ": expected an exception");
  }

  CheckResult finish(const std::string& suite) const {
    CheckResult res;
    res.suite = suite;
    res.assertions = assertions;
    res.passed = failures.empty();
    for (std::size_t i = 0; i < failures.size(); ++i)
      res.detail += (i ? "; " : "") + failures[i];
    return res;
  }
};

RealMatrix random_symmetric(Index n, RandomStream& rng) {
  RealMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = rng.normal();
    for (Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
  }
  return m;
}

ComplexMatrix random_hermitian(Index n, RandomStream& rng) {
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = Complex(rng.normal(), 0.0);
    for (Index j = i + 1; j < n; ++j) {
      m(i, j) = Complex(rng.normal(), rng.normal());
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

ComplexMatrix random_orthonormal(Index n, Index r, bool real, RandomStream& rng) {
  ComplexMatrix g(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j)
      g(i, j) = real ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, r);
  return q;
}

ComplexMatrix basis_columns(Index n, const std::vector<Index>& cols) {
  ComplexMatrix v = ComplexMatrix::Zero(n, static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) v(cols[j], static_cast<Index>(j)) = 1.0;
  return v;
}

double adjoint_defect(const ComplexMatrix& m) {
  return m.rows() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double tensor_max_diff(const CovarianceTensor& a, const CovarianceTensor& b) {
  double worst = 0.0;
  const Index r = a.dim();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l)
          worst = std::max(worst, std::abs(a.at(i, j, k, l) - b.at(i, j, k, l)));
  return worst;
}

/// Literal quadruple-sum evaluation of the third-moment tensor, kept as an
/// independent cross-check of the matrix-product evaluation.
CovarianceTensor oracle_w(const ComplexMatrix& v, const ComplexMatrix& mu3) {
  const Index n = v.rows();
  const Index r = v.cols();
  CovarianceTensor t(r);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          Complex sum = 0.0;
          for (Index a = 0; a < n; ++a)
            for (Index b = 0; b < n; ++b) {
              sum += std::conj(v(a, i)) * std::conj(v(a, k)) * v(a, l) * mu3(a, b) * v(b, j);
              sum += std::conj(v(a, i)) * mu3(a, b) * v(b, j) * std::conj(v(b, k)) * v(b, l);
            }
          t.at(i, j, k, l) = scale * sum;
        }
  return t;
}

CovarianceTensor oracle_r(const ComplexMatrix& v, const RealMatrix& mu4, SymmetryClass sym) {
  const Index n = v.rows();
  const Index r = v.cols();
  const double excess = 4.0 - beta(sym);
  CovarianceTensor t(r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          Complex sum = 0.0;
          for (Index b = 0; b < n; ++b) {
            double cb = 0.0;
            for (Index a = 0; a < n; ++a) cb += mu4(a, b) - excess;
            sum += cb * std::conj(v(b, i)) * v(b, j) * std::conj(v(b, k)) * v(b, l);
          }
          t.at(i, j, k, l) = sum / static_cast<double>(n);
        }
  return t;
}

double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Mean of xs with a 5-standard-error tolerance derived from the sample
/// itself, so no frozen variance constants are needed.
void expect_mean_near(Ctx& ctx, const std::vector<double>& xs, double want,
                      const std::string& what, double sigmas = 5.0,
                      double floor = 1e-12) {
  const double mean = sample_mean(xs);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(xs.size()));
  ctx.near(mean, want, std::max(sigmas * se, floor), what);
}

// ---------------------------------------------------------------------------

CheckResult suite_stieltjes(Ctx ctx) {
  ctx.near(stieltjes_m(Complex(3.0, 0.0)).real(), -0.3819660112501051, 1e-13, "m(3)");
  ctx.near(stieltjes_m(Complex(3.0, 0.0)).imag(), 0.0, 1e-14, "Im m(3)");

  for (double d : {-5.0, -2.0, -1.2, -1.05, 1.08, 1.7, 2.0, 3.7, 6.0}) {
    const Complex m = stieltjes_m(Complex(theta(d), 0.0));
    ctx.near(m.real(), -1.0 / d, 1e-10, "m(theta(d)) for d=" + fmt(d));
    const Complex mp = stieltjes_m_prime(Complex(theta(d), 0.0));
    ctx.near((std::abs(d) - 1.0) * mp.real(), 1.0 / (std::abs(d) + 1.0), 1e-10,
             "(|d|-1) m'(theta(d)) for d=" + fmt(d));
    ctx.near(theta_inverse(theta(d), d < 0 ? ThetaBranch::negative : ThetaBranch::positive),
             d, 1e-10, "theta_inverse(theta(d)) for d=" + fmt(d));
  }
  ctx.throws([] { theta(0.9); }, "theta inside the unit interval");
  ctx.throws([] { theta_inverse(1.5, ThetaBranch::positive); }, "theta_inverse(|t| < 2)");
  ctx.throws([] { theta_inverse(2.5, ThetaBranch::negative); }, "theta_inverse branch sign");
  ctx.throws([] { stieltjes_m(Complex(0.3, 0.0)); }, "m on the support");

  for (double x : {-3.0, -1.0, 0.0, 1.5, 2.5})
    for (double y : {0.05, 0.5, 2.0}) {
      const Complex z(x, y);
      const Complex m = stieltjes_m(z);
      ctx.expect(std::abs(m * m + z * m + 1.0) <= 1e-12,
                 "self-consistency at z=" + fmt(x) + "+" + fmt(y) + "i");
      ctx.expect(m.imag() > 0.0, "Herglotz branch at z=" + fmt(x) + "+" + fmt(y) + "i");
      ctx.expect(std::abs(m) <= 1.0 + 1e-12, "|m| <= 1 at z=" + fmt(x) + "+" + fmt(y) + "i");
    }

  ctx.near(semicircle_cdf(-2.0), 0.0, 1e-15, "F(-2)");
  ctx.near(semicircle_cdf(2.0), 1.0, 1e-15, "F(2)");
  ctx.near(semicircle_cdf(0.0), 0.5, 1e-15, "F(0)");
  ctx.near(semicircle_cdf(-3.0), 0.0, 0.0, "F clamps left");
  ctx.near(semicircle_cdf(3.0), 1.0, 0.0, "F clamps right");

  // Simpson quadrature of the density against the closed-form distribution.
  const double lo = -1.0, hi = 0.37;
  const int steps = 2000;
  double quad = 0.0;
  const double h = (hi - lo) / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = lo + i * h;
    quad += h / 6.0 *
            (semicircle_density(a) + 4.0 * semicircle_density(a + 0.5 * h) +
             semicircle_density(a + h));
  }
  ctx.near(quad, semicircle_cdf(hi) - semicircle_cdf(lo), 1e-10, "density integrates to F");

  const Index nloc = 41;
  const RealVector gamma = classical_locations(nloc);
  for (Index a = 1; a <= nloc; ++a)
    ctx.near(semicircle_cdf(gamma[a - 1]), static_cast<double>(a) / nloc, 1e-9,
             "n F(gamma_a) = a at a=" + fmt(static_cast<double>(a)));
  ctx.near(gamma[nloc - 1], 2.0, 1e-9, "gamma_n = 2");
  for (Index a = 1; a < nloc; ++a)
    ctx.expect(gamma[a - 1] < gamma[a], "gamma ascending");

  ctx.near(control_parameter(1000), 41.89287092792307, 1e-10, "phi(1000)");
  ctx.throws([] { control_parameter(2); }, "phi needs n >= 3");

  ControlParams cp;
  cp.n = 1000;
  ctx.near(cp.outlier_threshold(), 5.0 * std::pow(1000.0, -1.0 / 3.0), 1e-14,
           "factor threshold");
  cp.literal_phi_threshold = true;
  ctx.near(cp.outlier_threshold(),
           std::pow(control_parameter(1000), 2.0) * std::pow(1000.0, -1.0 / 3.0), 1e-10,
           "literal threshold");
  ctx.near(cp.coarse_cutoff(), control_parameter(1000), 1e-10, "coarse cutoff phi^(K/2)");

  ctx.near(edge_distance(2.3), 0.3, 1e-15, "edge distance outside");
  ctx.near(edge_distance(-1.4), 0.6, 1e-15, "edge distance inside");
  return ctx.finish("stieltjes");
}

// ---------------------------------------------------------------------------

void law_moment_block(Ctx& ctx, const EntryDistribution& law, double m3, double m4,
                      const std::string& tag) {
  ctx.near(law.third_moment(), m3, 1e-12, tag + " analytic m3");
  ctx.near(law.fourth_moment(), m4, 1e-12, tag + " analytic m4");

  const int m = 150000;
  std::vector<double> x1(m), x2(m), x3(m), x4(m);
  for (int t = 0; t < m; ++t) {
    const double x = law.sample(ctx.rng);
    x1[t] = x;
    x2[t] = x * x;
    x3[t] = x * x * x;
    x4[t] = x2[t] * x2[t];
  }
  expect_mean_near(ctx, x1, 0.0, tag + " sample mean", 6.0);
  expect_mean_near(ctx, x2, 1.0, tag + " sample variance", 6.0);
  expect_mean_near(ctx, x3, m3, tag + " sample m3", 6.0);
  expect_mean_near(ctx, x4, m4, tag + " sample m4", 6.0);
}

CheckResult suite_moments(Ctx ctx) {
  law_moment_block(ctx, EntryDistribution::gaussian(), 0.0, 3.0, "gaussian");
  law_moment_block(ctx, EntryDistribution::rademacher(), 0.0, 1.0, "rademacher");
  law_moment_block(ctx, EntryDistribution::skewed_two_point(2.0), 2.0, 5.0, "skewed(+2)");
  law_moment_block(ctx, EntryDistribution::skewed_two_point(-2.0), -2.0, 5.0, "skewed(-2)");
  law_moment_block(ctx, EntryDistribution::shifted_exponential(), 2.0, 9.0, "shifted exp");

  {
    // Standardized three-point table; moments recomputed here from scratch.
    const std::vector<double> vals{0.0, 1.0, 3.0};
    const std::vector<double> probs{0.5, 0.3, 0.2};
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < 3; ++i) mean += vals[i] * probs[i];
    for (int i = 0; i < 3; ++i) var += (vals[i] - mean) * (vals[i] - mean) * probs[i];
    double m3 = 0.0, m4 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double z = (vals[i] - mean) / std::sqrt(var);
      m3 += z * z * z * probs[i];
      m4 += z * z * z * z * probs[i];
    }
    law_moment_block(ctx, EntryDistribution::custom_table(vals, probs), m3, m4, "table");
  }
  {
    const double a = 1.0 + std::sqrt(2.0);
    const EntryDistribution law = EntryDistribution::skewed_two_point(2.0);
    ctx.near(law.table_values()[0], a, 1e-12, "two-point support a");
    ctx.near(law.table_values()[1], -1.0 / a, 1e-12, "two-point support -1/a");
    ctx.near(law.table_probabilities()[0], 1.0 / (1.0 + a * a), 1e-12, "two-point P(a)");
    ctx.near(law.fourth_moment(), law.third_moment() * law.third_moment() + 1.0, 1e-12,
             "two-point m4 = m3^2 + 1");
  }

  ctx.throws([] { EntryDistribution::custom_table({1.0, 1.0}, {0.5, 0.5}); },
             "degenerate table");
  ctx.throws([] { EntryDistribution::custom_table({0.0, 1.0}, {0.9, 0.2}); },
             "non-normalized table");

  // Analytic moment tensors under the matrix entry scalings.
  const EntryDistribution skew = EntryDistribution::skewed_two_point(2.0);
  {
    const MomentTensors mt = moment_tensors(skew, 10, SymmetryClass::real_symmetric);
    ctx.near(mt.mu3(0, 1).real(), 2.0, 1e-12, "beta=1 offdiag mu3");
    ctx.near(mt.mu3(0, 0).real(), 2.0 * std::sqrt(8.0), 1e-12, "beta=1 diag mu3");
    ctx.near(mt.mu4(0, 1), 5.0, 1e-12, "beta=1 offdiag mu4");
    ctx.near(mt.mu4(0, 0), 20.0, 1e-12, "beta=1 diag mu4");
  }
  {
    const MomentTensors mt = moment_tensors(skew, 10, SymmetryClass::complex_hermitian);
    const Complex want = 2.0 * Complex(1.0, 1.0) / (2.0 * std::sqrt(2.0));
    ctx.expect(std::abs(mt.mu3(0, 1) - want) <= 1e-12, "beta=2 offdiag mu3");
    ctx.near(mt.mu3(0, 0).real(), 2.0, 1e-12, "beta=2 diag mu3");
    ctx.near(mt.mu4(0, 1), 3.0, 1e-12, "beta=2 offdiag mu4 = (m4+1)/2");
    ctx.near(mt.mu4(0, 0), 5.0, 1e-12, "beta=2 diag mu4");
  }

  // The same tensors, estimated by sampling single scaled entries.
  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const double n = 64.0;
    const int m = 200000;
    const bool cplx = sym == SymmetryClass::complex_hermitian;
    std::vector<double> off3re(m), off3im(m), off4(m), diag3(m), diag4(m);
    for (int t = 0; t < m; ++t) {
      Complex h;
      if (cplx)
        h = Complex(skew.sample(ctx.rng), skew.sample(ctx.rng)) / std::sqrt(2.0 * n);
      else
        h = Complex(skew.sample(ctx.rng), 0.0) / std::sqrt(n);
      const Complex c3 = std::pow(n, 1.5) * std::norm(h) * h;
      off3re[t] = c3.real();
      off3im[t] = c3.imag();
      off4[t] = n * n * std::norm(h) * std::norm(h);
      const double g = (cplx ? 1.0 : std::sqrt(2.0)) * skew.sample(ctx.rng) / std::sqrt(n);
      diag3[t] = std::pow(n, 1.5) * g * g * g;
      diag4[t] = n * n * g * g * g * g;
    }
    const MomentTensors mt = moment_tensors(skew, 64, sym);
    const std::string tag = cplx ? "beta=2" : "beta=1";
    expect_mean_near(ctx, off3re, mt.mu3(0, 1).real(), tag + " empirical Re mu3", 6.0);
    expect_mean_near(ctx, off3im, mt.mu3(0, 1).imag(), tag + " empirical Im mu3", 6.0);
    expect_mean_near(ctx, off4, mt.mu4(0, 1), tag + " empirical offdiag mu4", 6.0);
    expect_mean_near(ctx, diag3, mt.mu3(0, 0).real(), tag + " empirical diag mu3", 6.0);
    expect_mean_near(ctx, diag4, mt.mu4(0, 0), tag + " empirical diag mu4", 6.0);
  }

  // Full matrix samples: self-adjointness and pooled entry variances.
  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const Index n = 24;
    std::vector<double> offv, diagv, offsq;
    for (int rep = 0; rep < 200; ++rep) {
      const WignerMatrix w = sample_wigner(n, sym, EntryDistribution::gaussian(), ctx.rng);
      const ComplexMatrix h = w.entries.to_complex();
      ctx.expect(adjoint_defect(h) <= 1e-14, "wigner draw self-adjoint");
      for (Index i = 0; i < n; ++i) {
        diagv.push_back(n * std::norm(h(i, i)));
        for (Index j = i + 1; j < n; ++j) {
          offv.push_back(n * std::norm(h(i, j)));
          offsq.push_back(n * (h(i, j) * h(i, j)).real());
        }
      }
    }
    const bool cplx = sym == SymmetryClass::complex_hermitian;
    expect_mean_near(ctx, offv, 1.0, "pooled offdiag variance", 6.0);
    expect_mean_near(ctx, diagv, cplx ? 1.0 : 2.0, "pooled diag variance", 6.0);
    expect_mean_near(ctx, offsq, cplx ? 0.0 : 1.0, "pooled E h^2", 6.0);
  }
  return ctx.finish("moments");
}

// ---------------------------------------------------------------------------

CheckResult suite_partition(Ctx ctx) {
  {
    RealVector d(2);
    d << -2.0, 3.0;
    ctx.expect(alpha_index(1, d, 10) == 1, "alpha(1) for negative strength");
    ctx.expect(alpha_index(2, d, 10) == 10, "alpha(2) for positive strength");
    RealVector d3(3);
    d3 << -5.0, -2.0, 4.0;
    ctx.expect(alpha_index(2, d3, 100) == 2, "alpha packs negatives from below");
    ctx.expect(alpha_index(3, d3, 100) == 100, "alpha packs positives from above");
    ctx.throws([&] { alpha_index(0, d, 10); }, "alpha range check");
  }

  ctx.near(overlap_metric(1.5, 1.501, 10000), 0.07071067811865475, 1e-12,
           "overlap metric frozen value");
  ctx.throws([] { overlap_metric(0.8, 1.5, 100); }, "overlap metric needs |d_i| > 1");

  {
    ControlParams cp;
    cp.n = 10000;
    RealVector d(3);
    d << 1.5, 1.5005, 3.0;
    const Partition part = partition_fine(d, cp);
    ctx.expect(part.blocks == std::vector<std::vector<int>>{{1, 2}, {3}},
               "fine partition resolves the distant strength");
    ctx.expect(part.covered() == std::vector<int>{1, 2, 3}, "fine partition covers all");
  }
  {
    // With cutoff 5 the pair at distance 0.1 stays split; the coarse cutoff
    // phi(10^4) ~ 138 merges everything.
    ControlParams cp;
    cp.n = 10000;
    cp.s_cutoff = 5.0;
    RealVector d(3);
    d << 1.5, 1.5005, 1.6;
    const Partition fine = partition_fine(d, cp);
    const Partition coarse = partition_coarse(d, cp);
    ctx.expect(fine.blocks == std::vector<std::vector<int>>{{1, 2}, {3}},
               "fine blocks at cutoff 5");
    ctx.expect(coarse.blocks == std::vector<std::vector<int>>{{1, 2, 3}},
               "coarse blocks merge");
    ctx.near(coarse.cutoff, control_parameter(10000), 1e-10, "coarse cutoff value");
    for (const auto& fb : fine.blocks) {
      bool inside = false;
      for (const auto& cb : coarse.blocks)
        inside = inside || std::includes(cb.begin(), cb.end(), fb.begin(), fb.end());
      ctx.expect(inside, "fine refines coarse");
    }
  }
  {
    // Merging uses the metric in both index orders: (1.1 -> 2.0) passes the
    // cutoff while (2.0 -> 1.1) does not, and the pair must still merge.
    ControlParams cp;
    cp.n = 10000;
    cp.s_cutoff = 30.0;
    RealVector d(2);
    d << 1.1, 2.0;
    ctx.expect(overlap_metric(d[0], d[1], cp.n) < 30.0, "forward metric passes");
    ctx.expect(overlap_metric(d[1], d[0], cp.n) > 30.0, "reverse metric fails");
    ctx.expect(partition_fine(d, cp).blocks == std::vector<std::vector<int>>{{1, 2}},
               "either order suffices to merge");
  }
  {
    // Sign-mixed blocks are rejected: at n = 25 with a permissive cutoff the
    // strengths -1.5 and 1.5 fall in one component.
    ControlParams cp;
    cp.n = 25;
    cp.outlier_factor = 1.0;
    cp.s_cutoff = 12.0;
    RealVector d(2);
    d << -1.5, 1.5;
    ctx.throws([&] { partition_fine(d, cp); }, "sign-mixed block rejected");
  }
  {
    // Strengths below the detection threshold are dropped from the partition.
    ControlParams cp;
    cp.n = 1000;
    RealVector d(2);
    d << 1.05, 2.5;
    const Partition part = partition_fine(d, cp);
    ctx.expect(part.blocks == std::vector<std::vector<int>>{{2}}, "weak strength dropped");
    ctx.expect(part.covered_size() == 1, "covered size");
  }

  // Monotonicity: a larger cutoff can only merge blocks, never split them.
  for (int rep = 0; rep < 300; ++rep) {
    const int r = 2 + static_cast<int>(ctx.rng.uniform_below(4));
    const double sign = ctx.rng.uniform() < 0.5 ? -1.0 : 1.0;
    std::vector<double> ds(r);
    // Strengths clear the detection threshold, so the covered set is the
    // same for every cutoff and only the grouping can change.
    for (double& x : ds) x = 1.4 + 1.6 * ctx.rng.uniform();
    std::sort(ds.begin(), ds.end());
    RealVector d(r);
    for (int i = 0; i < r; ++i) d[i] = sign * ds[sign < 0 ? r - 1 - i : i];
    ControlParams cp;
    cp.n = 4000;
    cp.s_cutoff = 0.5 + 30.0 * ctx.rng.uniform();
    const Partition small = partition_fine(d, cp);
    ControlParams cp2 = cp;
    cp2.s_cutoff = cp.s_cutoff * (1.5 + 3.0 * ctx.rng.uniform());
    const Partition large = partition_fine(d, cp2);
    bool refines = true;
    for (const auto& sb : small.blocks) {
      bool inside = false;
      for (const auto& lb : large.blocks)
        inside = inside || std::includes(lb.begin(), lb.end(), sb.begin(), sb.end());
      refines = refines && inside;
    }
    ctx.expect(refines, "cutoff monotonicity rep=" + fmt(rep));
    ctx.expect(small.covered() == large.covered(), "covered set independent of cutoff");
    for (const auto& b : small.blocks) {
      for (std::size_t i = 1; i < b.size(); ++i)
        ctx.expect(b[i] == b[i - 1] + 1, "blocks consecutive");
    }
  }

  {
    RealVector d(3);
    d << 1.4, 1.4001, 2.2;
    std::vector<int> block{1, 2};
    ctx.near(block_reference_d(block, d), 1.4, 0.0, "block reference strength");
  }
  {
    // alpha positions evaluated from a partial spectrum.
    RealVector full(6);
    full << -3.0, -1.5, 0.0, 0.2, 1.9, 4.0;
    const PartialSpectrum ps = PartialSpectrum::from_full(full);
    ctx.near(ps.value_at(1), -3.0, 0.0, "partial spectrum low end");
    ctx.near(ps.value_at(6), 4.0, 0.0, "partial spectrum high end");
    PartialSpectrum ends;
    ends.n = 6;
    ends.low = full.head(2);
    ends.high = full.tail(2);
    ctx.near(ends.value_at(2), -1.5, 0.0, "ends spectrum position 2");
    ctx.near(ends.value_at(5), 1.9, 0.0, "ends spectrum position 5");
    ctx.throws([&] { ends.value_at(3); }, "uncovered position rejected");
  }
  {
    // Rescaling around theta(d_pi) with the block reference strength.
    ControlParams cp;
    cp.n = 1000;
    RealVector d(2);
    d << 1.8, 1.8004;
    const Partition part = partition_fine(d, cp);
    ctx.expect(part.blocks.size() == 1, "one block for near ties");
    RealVector spec = RealVector::LinSpaced(1000, -2.0, 2.0);
    spec[998] = theta(1.8) + 0.01;
    spec[999] = theta(1.8) + 0.02;
    const RescaledOutliers z = extract_and_rescale(spec, part, d, 1000);
    const double scale = std::sqrt(1000.0) / std::sqrt(0.8);
    ctx.near(z.values[0], scale * 0.01, 1e-9, "zeta of first outlier");
    ctx.near(z.values[1], scale * 0.02, 1e-9, "zeta of second outlier");
    ctx.expect(z.indices == std::vector<int>{1, 2} && z.block_of == std::vector<int>{0, 0},
               "covered bookkeeping");
  }
  return ctx.finish("partition");
}

// ---------------------------------------------------------------------------

CheckResult suite_tensors(Ctx ctx, FaultInjection inject) {
  // The injection point: every pairing tensor used in this suite goes through
  // this wrapper, so a sign flip must be caught by the identities below.
  const auto pairing = [inject](const ComplexMatrix& r_mat, SymmetryClass sym) {
    CovarianceTensor t = tensor_p(r_mat, sym);
    if (inject == FaultInjection::flip_p_sign) t.scale(-1.0);
    return t;
  };

  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const bool real = sym == SymmetryClass::real_symmetric;
    const CovarianceTensor delta = tensor_delta(2, sym);
    ctx.near(delta.at(0, 1, 1, 0).real(), 1.0, 0.0, "delta exchange entry");
    ctx.near(delta.at(0, 1, 0, 1).real(), real ? 1.0 : 0.0, 0.0, "delta square entry");
    ctx.near(delta.at(0, 0, 0, 0).real(), real ? 2.0 : 1.0, 0.0, "delta diagonal entry");
    ctx.near(delta.at(0, 0, 1, 1).real(), 0.0, 0.0, "delta distinct diagonal");
    ctx.expect(delta.structure_defect() <= 1e-15, "delta structure identity");

    ctx.near(tensor_max_diff(pairing(ComplexMatrix::Identity(2, 2), sym), delta), 0.0,
             1e-15, "pairing at identity equals delta");

    const ComplexMatrix v = random_orthonormal(40, 2, real, ctx.rng);
    const ComplexMatrix r_mat = v.adjoint() * v;
    const CovarianceTensor p = pairing(r_mat, sym);
    ctx.expect(p.structure_defect() <= 1e-12, "pairing structure identity");
    if (real) {
      const double want = 2.0 * (r_mat(0, 0) * r_mat(0, 0)).real();
      ctx.near(p.at(0, 0, 0, 0).real(), want, 1e-12, "pairing diagonal doubles");
    }
  }

  {
    // Uniform direction: S(v) has the closed form m3 (1 + (2 sqrt(2) - 1)/n)
    // from the heavier diagonal third moment.
    const Index n = 50;
    const double m3 = 2.0;
    const EntryDistribution law = EntryDistribution::skewed_two_point(m3);
    ComplexMatrix v = ComplexMatrix::Constant(n, 1, Complex(1.0 / std::sqrt(50.0), 0.0));
    const MomentTensors mt = moment_tensors(law, n, SymmetryClass::real_symmetric);
    const ComplexMatrix s = tensor_s(v, mt);
    ctx.near(s(0, 0).real(), m3 * (1.0 + (2.0 * std::sqrt(2.0) - 1.0) / n), 1e-12,
             "uniform-direction S");
    const MomentTensors mt0 =
        moment_tensors(EntryDistribution::gaussian(), n, SymmetryClass::real_symmetric);
    ctx.near(tensor_s(v, mt0)(0, 0).real(), 0.0, 1e-15, "S vanishes without skewness");
  }

  for (SymmetryClass sym :
       {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
    const bool real = sym == SymmetryClass::real_symmetric;
    const EntryDistribution law = EntryDistribution::skewed_two_point(-1.5);
    {
      const Index n = 120, r = 3;
      const ComplexMatrix v = random_orthonormal(n, r, real, ctx.rng);
      const MomentTensors mt = moment_tensors(law, n, sym);
      const CovarianceTensor w = tensor_w(v, mt);
      const CovarianceTensor q = tensor_q(v, mt);
      double worst = 0.0;
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j)
          for (Index k = 0; k < r; ++k)
            for (Index l = 0; l < r; ++l)
              worst = std::max(worst, std::abs(q.at(i, j, k, l) - w.at(i, j, k, l) -
                                               w.at(k, l, i, j)));
      ctx.expect(worst <= 1e-12, "Q is W plus its swap");
      ctx.expect(q.structure_defect() <= 1e-12, "Q structure identity");
      ctx.expect(tensor_r(v, mt, sym).structure_defect() <= 1e-12, "R structure identity");
    }
    {
      // Quadruple-sum oracle at small size.
      const Index n = 40, r = 2;
      const ComplexMatrix v = random_orthonormal(n, r, real, ctx.rng);
      const MomentTensors mt = moment_tensors(law, n, sym);
      ctx.expect(tensor_max_diff(tensor_w(v, mt), oracle_w(v, mt.mu3)) <= 1e-10,
                 "fast W matches quadruple sum");
      ctx.expect(tensor_max_diff(tensor_r(v, mt, sym), oracle_r(v, mt.mu4, sym)) <= 1e-12,
                 "fast R matches quadruple sum");
    }
    {
      // Gaussian entries leave only an O(1/n) kurtosis remainder.
      const Index n = 200;
      const ComplexMatrix v = random_orthonormal(n, 2, real, ctx.rng);
      const MomentTensors mt = moment_tensors(EntryDistribution::gaussian(), n, sym);
      ctx.expect(tensor_r(v, mt, sym).max_abs() <= 10.0 / n, "gaussian R is O(1/n)");
      if (!real)
        ctx.expect(tensor_w(v, mt).max_abs() <= 1e-12, "gaussian W vanishes");
    }
  }
  return ctx.finish("tensors");
}

// ---------------------------------------------------------------------------

ReferenceSpec make_spec(Deformation def, EntryDistribution law, SymmetryClass sym,
                        double delta_cutoff, bool include_e) {
  ReferenceSpec spec{std::move(def), std::move(law), sym};
  spec.cp.n = spec.deformation.n();
  spec.delta_cutoff = delta_cutoff;
  spec.include_e_term = include_e;
  return spec;
}

CheckResult suite_psd(Ctx ctx, FaultInjection inject) {
  const bool include_e = inject != FaultInjection::drop_e_term;

  {
    // Delocalized direction: the truncation empties V and the covariance
    // collapses to ((|d|+1)/d^2 + 1/phi) Delta.
    const Index n = 1000;
    for (SymmetryClass sym :
         {SymmetryClass::real_symmetric, SymmetryClass::complex_hermitian}) {
      ComplexMatrix v = ComplexMatrix::Constant(n, 1, Complex(1.0 / std::sqrt(1000.0), 0.0));
      RealVector d(1);
      d << 2.0;
      const ReferenceSpec spec =
          make_spec(Deformation(v, d), EntryDistribution::gaussian(), sym, 0.0, include_e);
      const CovarianceTensor cov = psi_covariance_single(spec, {1});
      const double base = 0.75 + (include_e ? 1.0 / control_parameter(n) : 0.0);
      const double want = (sym == SymmetryClass::real_symmetric ? 2.0 : 1.0) * base;
      ctx.near(cov.at(0, 0, 0, 0).real(), want, 1e-4, "delocalized gaussian covariance");
      ctx.expect(cov.structure_defect() <= 1e-12, "single-block structure identity");
    }
  }
  {
    // Standard-basis direction, beta = 2: all four corrections contribute and
    // the entry must match an independently written scalar formula.
    const Index n = 1000;
    const double d = 2.0;
    ComplexMatrix v = basis_columns(n, {0});
    RealVector dv(1);
    dv << d;
    const ReferenceSpec spec = make_spec(Deformation(v, dv), EntryDistribution::gaussian(),
                                         SymmetryClass::complex_hermitian, 0.0, include_e);
    const CovarianceTensor cov = psi_covariance_single(spec, {1});
    // c_b = sum_a mu4_ab - 2n = 2(n-1) + 3 - 2n = 1, so R = 1/n on the spike.
    const double pref = (d + 1.0) * (d + 1.0) * (d - 1.0);
    double want = (d + 1.0) / (d * d) - pref * 1.0 / std::pow(d, 4.0) +
                  pref * (1.0 / n) / std::pow(d, 6.0);
    if (include_e) want += 1.0 / control_parameter(n);
    ctx.near(cov.at(0, 0, 0, 0).real(), want, 1e-12, "spiked gaussian covariance");
  }
  {
    // Documented near-degenerate configuration: without the regularizing term
    // the third-moment correction drives the covariance indefinite, with it
    // the smallest pair eigenvalue is comfortably positive.
    const Index n = 100;
    ComplexMatrix v = basis_columns(n, {0});
    RealVector d(1);
    d << 3.0;
    const ReferenceSpec spec =
        make_spec(Deformation(v, d), EntryDistribution::skewed_two_point(-2.0),
                  SymmetryClass::real_symmetric, 0.0, include_e);
    const CovarianceTensor cov = psi_covariance_single(spec, {1});
    ctx.expect(cov.min_pair_eigenvalue() >= 0.05,
               "regularized near-degenerate covariance is positive, got " +
                   fmt(cov.min_pair_eigenvalue()));
    // Exact hand evaluation on the spike: Delta gives 2(d+1)/d^2, the pairing
    // removes 2(d+1)^2(d-1)/d^4, the third-moment part contributes
    // (d+1)^2(d-1) * 2 * (2 mu3_diag / sqrt(n)) / d^5 with mu3_diag =
    // 2 sqrt(2) m3, and the kurtosis part (d+1)^2(d-1) ((103 m4 - 3n)/n) / d^6.
    const double no_e = 2.0 * 4.0 / 9.0 - 64.0 / 81.0 -
                        256.0 * std::sqrt(2.0) / 1215.0 + 32.0 * 2.15 / 729.0;
    ctx.near(cov.min_pair_eigenvalue() - (include_e ? 2.0 / control_parameter(n) : 0.0),
             no_e, 1e-9, "near-degenerate covariance decomposition");
  }
  {
    // Joint covariance across two well-separated opposite-sign blocks.
    const Index n = 1000;
    ComplexMatrix v = basis_columns(n, {0, 1});
    RealVector d(2);
    d << -2.0, 2.0;
    const ReferenceSpec spec = make_spec(Deformation(v, d), EntryDistribution::gaussian(),
                                         SymmetryClass::complex_hermitian, 0.0, include_e);
    const CovarianceTensor joint = psi_covariance_joint(spec);
    ctx.expect(joint.dim() == 2, "joint dimension");
    double cross = 0.0;
    cross = std::max(cross, std::abs(joint.at(0, 0, 1, 1)));
    cross = std::max(cross, std::abs(joint.at(0, 1, 0, 1)));
    cross = std::max(cross, std::abs(joint.at(0, 1, 1, 0)));
    ctx.near(cross, 0.0, 1e-15, "straddling entries vanish");
    const CovarianceTensor lo = psi_covariance_single(spec, {1});
    const CovarianceTensor hi = psi_covariance_single(spec, {2});
    ctx.near(std::abs(joint.at(0, 0, 0, 0) - lo.at(0, 0, 0, 0)), 0.0, 1e-12,
             "joint restricts to first block");
    ctx.near(std::abs(joint.at(1, 1, 1, 1) - hi.at(0, 0, 0, 0)), 0.0, 1e-12,
             "joint restricts to second block");
    ctx.expect(joint.structure_defect() <= 1e-12, "joint structure identity");
  }

  // Randomized sweep: every admissible configuration must assemble into a
  // covariance whose pair matrix is positive semidefinite to rounding error.
  const std::vector<EntryDistribution> laws{
      EntryDistribution::gaussian(), EntryDistribution::rademacher(),
      EntryDistribution::skewed_two_point(1.5), EntryDistribution::skewed_two_point(-2.0),
      EntryDistribution::shifted_exponential()};
  for (int rep = 0; rep < 250; ++rep) {
    const Index n = 60 + static_cast<Index>(ctx.rng.uniform_below(160));
    const SymmetryClass sym = ctx.rng.uniform() < 0.5 ? SymmetryClass::real_symmetric
                                                      : SymmetryClass::complex_hermitian;
    const bool real = sym == SymmetryClass::real_symmetric;
    const EntryDistribution& law = laws[ctx.rng.uniform_below(laws.size())];
    const Index r = 1 + static_cast<Index>(ctx.rng.uniform_below(3));
    ComplexMatrix v;
    if (ctx.rng.uniform() < 0.5) {
      std::vector<Index> cols(r);
      for (Index j = 0; j < r; ++j) cols[j] = 2 * j;
      v = basis_columns(n, cols);
    } else {
      v = random_orthonormal(n, r, real, ctx.rng);
    }
    const double sign = ctx.rng.uniform() < 0.5 ? -1.0 : 1.0;
    std::vector<double> ds(r);
    for (double& x : ds) x = sign * (1.4 + 2.0 * ctx.rng.uniform());
    std::sort(ds.begin(), ds.end());
    RealVector d(r);
    for (Index i = 0; i < r; ++i) d[i] = ds[i];
    const double delta = ctx.rng.uniform() < 0.3
                             ? 1.0 / control_parameter(n) + 0.5 * ctx.rng.uniform()
                             : 0.0;
    const ReferenceSpec spec = make_spec(Deformation(v, d), law, sym, delta, include_e);
    try {
      const CovarianceTensor joint = psi_covariance_joint(spec);
      ctx.expect(joint.structure_defect() <= 1e-10, "sweep structure identity");
      ctx.expect(joint.min_pair_eigenvalue() >=
                     -1e-10 * std::max(joint.pair_trace(), 0.0) - 1e-12,
                 "sweep positive semidefinite, rep=" + fmt(rep));
    } catch (const std::exception& e) {
      ctx.expect(false, std::string("sweep rejected a valid covariance: ") + e.what());
    }
  }

  {
    // A tensor violating positivity must be rejected by the sampler.
    CovarianceTensor bad = tensor_delta(2, SymmetryClass::complex_hermitian);
    bad.scale(-1.0);
    ctx.throws([&] { HermitianGaussianSampler s(bad, SymmetryClass::complex_hermitian); },
               "negative covariance rejected");
    ctx.expect(bad.min_pair_eigenvalue() < -0.5, "negative covariance detected");
  }
  return ctx.finish("psd");
}

// ---------------------------------------------------------------------------

void sampler_moment_block(Ctx& ctx, const CovarianceTensor& cov, SymmetryClass sym,
                          int draws, const std::string& tag, double floor) {
  const HermitianGaussianSampler sampler(cov, sym);
  const Index r = cov.dim();
  std::vector<ComplexMatrix> samples;
  samples.reserve(draws);
  for (int t = 0; t < draws; ++t)
    samples.push_back(sampler.sample(ctx.rng).to_complex());
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      for (Index k = 0; k < r; ++k)
        for (Index l = 0; l < r; ++l) {
          std::vector<double> re(draws), im(draws);
          for (int t = 0; t < draws; ++t) {
            const Complex prod = samples[t](i, j) * samples[t](k, l);
            re[t] = prod.real();
            im[t] = prod.imag();
          }
          const Complex want = cov.at(i, j, k, l);
          const std::string what = tag + " cov(" + fmt(i) + fmt(j) + "," + fmt(k) + fmt(l) + ")";
          expect_mean_near(ctx, re, want.real(), what + " re", 5.0, floor);
          expect_mean_near(ctx, im, want.imag(), what + " im", 5.0, floor);
        }
}

CheckResult suite_sampler(Ctx ctx) {
  {
    const CovarianceTensor delta = tensor_delta(2, SymmetryClass::complex_hermitian);
    const HermitianGaussianSampler sampler(delta, SymmetryClass::complex_hermitian);
    ctx.expect(sampler.clipped_modes() == 0, "no modes clipped for delta");
    const int draws = 100000;
    std::vector<double> d11(draws), exch(draws), sq_re(draws), sq_im(draws), dd(draws);
    double worst_defect = 0.0;
    for (int t = 0; t < draws; ++t) {
      const ComplexMatrix m = sampler.sample(ctx.rng).to_complex();
      d11[t] = (m(0, 0) * m(0, 0)).real();
      exch[t] = (m(0, 1) * m(1, 0)).real();
      const Complex sq = m(0, 1) * m(0, 1);
      sq_re[t] = sq.real();
      sq_im[t] = sq.imag();
      dd[t] = (m(0, 0) * m(1, 1)).real();
      worst_defect = std::max(worst_defect, adjoint_defect(m));
    }
    ctx.expect(worst_defect <= 1e-12, "draws self-adjoint");
    expect_mean_near(ctx, d11, 1.0, "E psi_11^2", 5.0);
    expect_mean_near(ctx, exch, 1.0, "E psi_12 psi_21", 5.0);
    expect_mean_near(ctx, sq_re, 0.0, "Re E psi_12^2", 5.0);
    expect_mean_near(ctx, sq_im, 0.0, "Im E psi_12^2", 5.0);
    expect_mean_near(ctx, dd, 0.0, "E psi_11 psi_22", 5.0);
  }
  {
    const CovarianceTensor delta = tensor_delta(2, SymmetryClass::real_symmetric);
    sampler_moment_block(ctx, delta, SymmetryClass::real_symmetric, 40000,
                         "real delta", 5e-3);
  }

  // Random valid tensors, built as Gram averages so positivity and the
  // structure identity hold by construction.
  for (int rep = 0; rep < 10; ++rep) {
    const SymmetryClass sym = rep % 2 == 0 ? SymmetryClass::real_symmetric
                                           : SymmetryClass::complex_hermitian;
    const Index r = 2;
    CovarianceTensor cov(r);
    const int terms = 6;
    for (int m = 0; m < terms; ++m) {
      const ComplexMatrix a = sym == SymmetryClass::real_symmetric
                                  ? random_symmetric(r, ctx.rng).cast<Complex>().eval()
                                  : random_hermitian(r, ctx.rng);
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < r; ++j)
          for (Index k = 0; k < r; ++k)
            for (Index l = 0; l < r; ++l)
              cov.at(i, j, k, l) += a(i, j) * a(k, l) / static_cast<double>(terms);
    }
    ctx.expect(cov.structure_defect() <= 1e-12, "gram tensor structure identity");
    ctx.expect(cov.min_pair_eigenvalue() >= -1e-10, "gram tensor positive");
    sampler_moment_block(ctx, cov, sym, 30000, "gram rep=" + fmt(rep), 0.05);
  }
  return ctx.finish("sampler");
}

// ---------------------------------------------------------------------------

CheckResult suite_projection(Ctx ctx) {
  {
    // Empty support: the projected form is exactly zero.
    ComplexMatrix v = ComplexMatrix::Constant(100, 2, Complex(0.05, 0.0));
    const ComplexMatrix vd = truncate_v(v, 0.2);
    ctx.near(vd.cwiseAbs().maxCoeff(), 0.0, 0.0, "truncation empties v");
    const SelfAdjointMatrix q = projected_quadratic_form(
        vd, EntryDistribution::gaussian(), SymmetryClass::real_symmetric, ctx.rng);
    ctx.near(q.to_complex().cwiseAbs().maxCoeff(), 0.0, 0.0, "empty support gives zero");
  }
  {
    // Truncation keeps large entries untouched and zeroes the rest.
    ComplexMatrix v(4, 1);
    v << Complex(0.6, 0.0), Complex(0.1, 0.0), Complex(-0.75, 0.0), Complex(0.0, 0.26);
    const ComplexMatrix vd = truncate_v(v, 0.25);
    ctx.expect(vd(0, 0) == v(0, 0) && vd(2, 0) == v(2, 0) && vd(3, 0) == v(3, 0) &&
                   vd(1, 0) == Complex(0.0, 0.0),
               "entrywise truncation");
  }

  const double n = 400.0;
  {
    // Spiked direction, beta = 1: sqrt(n) q is the doubled-variance diagonal.
    ComplexMatrix v = basis_columns(400, {0});
    const int draws = 40000;
    std::vector<double> q2(draws);
    for (int t = 0; t < draws; ++t) {
      const SelfAdjointMatrix q = projected_quadratic_form(
          v, EntryDistribution::gaussian(), SymmetryClass::real_symmetric, ctx.rng);
      const double x = std::sqrt(n) * q.to_complex()(0, 0).real();
      q2[t] = x * x;
    }
    expect_mean_near(ctx, q2, 2.0, "spiked direction variance", 5.0);
  }
  {
    // Partial support embedded in a large matrix: for any real unit vector
    // the beta = 1 variance of sqrt(n) q is exactly 2.
    ComplexMatrix v = ComplexMatrix::Zero(400, 1);
    v(3, 0) = 0.6;
    v(17, 0) = 0.8;
    const int draws = 40000;
    std::vector<double> q2(draws), q1(draws);
    for (int t = 0; t < draws; ++t) {
      const SelfAdjointMatrix q = projected_quadratic_form(
          v, EntryDistribution::rademacher(), SymmetryClass::real_symmetric, ctx.rng);
      const double x = std::sqrt(n) * q.to_complex()(0, 0).real();
      q1[t] = x;
      q2[t] = x * x;
    }
    expect_mean_near(ctx, q1, 0.0, "partial support mean", 5.0);
    expect_mean_near(ctx, q2, 2.0, "partial support variance", 5.0);
  }
  {
    // Two spiked directions, beta = 2: the form is the Hermitian 2x2 minor.
    ComplexMatrix v = basis_columns(400, {0, 1});
    const int draws = 40000;
    std::vector<double> off2(draws), offsq_re(draws), diag2(draws);
    double worst_defect = 0.0;
    for (int t = 0; t < draws; ++t) {
      const ComplexMatrix q = projected_quadratic_form(v, EntryDistribution::gaussian(),
                                                       SymmetryClass::complex_hermitian,
                                                       ctx.rng)
                                  .to_complex();
      worst_defect = std::max(worst_defect, adjoint_defect(q));
      off2[t] = n * std::norm(q(0, 1));
      offsq_re[t] = n * (q(0, 1) * q(0, 1)).real();
      diag2[t] = n * std::norm(q(0, 0));
    }
    ctx.expect(worst_defect <= 1e-14, "projected form self-adjoint");
    expect_mean_near(ctx, off2, 1.0, "minor offdiag variance", 5.0);
    expect_mean_near(ctx, offsq_re, 0.0, "minor E q^2", 5.0);
    expect_mean_near(ctx, diag2, 1.0, "minor diag variance", 5.0);
  }
  {
    // Identical streams give identical draws.
    ComplexMatrix v = random_orthonormal(50, 2, false, ctx.rng);
    RandomStream a = RandomStream::derive(7, 1, 2);
    RandomStream b = RandomStream::derive(7, 1, 2);
    const ComplexMatrix qa = projected_quadratic_form(v, EntryDistribution::gaussian(),
                                                      SymmetryClass::complex_hermitian, a)
                                 .to_complex();
    const ComplexMatrix qb = projected_quadratic_form(v, EntryDistribution::gaussian(),
                                                      SymmetryClass::complex_hermitian, b)
                                 .to_complex();
    ctx.near((qa - qb).cwiseAbs().maxCoeff(), 0.0, 0.0, "derived streams reproduce");
  }
  return ctx.finish("projection");
}

// ---------------------------------------------------------------------------

CheckResult suite_perturbation(Ctx ctx) {
  {
    BlockPerturbation bp;
    bp.a11 = ComplexMatrix::Zero(1, 1);
    bp.a22 = ComplexMatrix::Constant(1, 1, Complex(10.0, 0.0));
    bp.b12 = ComplexMatrix::Constant(1, 1, Complex(1.0, 0.0));
    const PerturbationReport rep = perturbation_bound(bp);
    ctx.near(rep.gap, 10.0, 1e-14, "block gap");
    ctx.near(rep.coupling_norm, 1.0, 1e-14, "coupling norm");
    ctx.near(rep.bound, 0.125, 1e-14, "stability bound");
    ctx.near(rep.perturbed[0], 5.0 - std::sqrt(26.0), 1e-12, "perturbed eigenvalue");
    ctx.near(rep.deviations[0], std::sqrt(26.0) - 5.0, 1e-12, "deviation");
    ctx.expect(rep.holds, "bound holds in the 2x2 example");
  }
  {
    // Gap below 3 ||B|| is outside the regime and must be rejected.
    BlockPerturbation bp;
    bp.a11 = ComplexMatrix::Zero(1, 1);
    bp.a22 = ComplexMatrix::Constant(1, 1, Complex(2.5, 0.0));
    bp.b12 = ComplexMatrix::Constant(1, 1, Complex(1.0, 0.0));
    ctx.throws([&] { perturbation_bound(bp); }, "narrow gap rejected");
  }

  for (int rep = 0; rep < 2000; ++rep) {
    const Index n1 = 1 + static_cast<Index>(ctx.rng.uniform_below(6));
    const Index n2 = 1 + static_cast<Index>(ctx.rng.uniform_below(6));
    const bool real = ctx.rng.uniform() < 0.5;
    ComplexMatrix a11 = real ? random_symmetric(n1, ctx.rng).cast<Complex>().eval()
                             : random_hermitian(n1, ctx.rng);
    ComplexMatrix a22 = real ? random_symmetric(n2, ctx.rng).cast<Complex>().eval()
                             : random_hermitian(n2, ctx.rng);
    a11 *= 0.4;
    a22 *= 0.4;
    const double split = 4.0 + 6.0 * ctx.rng.uniform();
    a22 += split * ComplexMatrix::Identity(n2, n2);
    ComplexMatrix b12(n1, n2);
    for (Index i = 0; i < n1; ++i)
      for (Index j = 0; j < n2; ++j)
        b12(i, j) = real ? Complex(ctx.rng.normal(), 0.0)
                         : Complex(ctx.rng.normal(), ctx.rng.normal());
    b12 *= 0.15;

    BlockPerturbation bp{a11, a22, b12};
    try {
      const PerturbationReport report = perturbation_bound(bp);
      ctx.expect(report.holds, "randomized bound holds, rep=" + fmt(rep));
      // Re-verify against a full eigensolve assembled here.
      const Index n = n1 + n2;
      ComplexMatrix full = ComplexMatrix::Zero(n, n);
      full.topLeftCorner(n1, n1) = a11;
      full.bottomRightCorner(n2, n2) = a22;
      full.topRightCorner(n1, n2) = b12;
      full.bottomLeftCorner(n2, n1) = b12.adjoint();
      const RealVector mu = eigenvalues_sorted(SelfAdjointMatrix(full));
      const RealVector lam = eigenvalues_sorted(SelfAdjointMatrix(a11));
      for (Index i = 0; i < n1; ++i)
        ctx.expect(std::abs(mu[i] - lam[i]) <= report.bound + 1e-10,
                   "independent eigensolve within bound, rep=" + fmt(rep));
    } catch (const std::invalid_argument&) {
      // The random gap occasionally dips below 3 ||B||; skipping is correct.
      ctx.expect(true, "regime guard");
    }
  }

  for (int rep = 0; rep < 500; ++rep) {
    const Index n = 2 + static_cast<Index>(ctx.rng.uniform_below(8));
    const RealMatrix a = random_symmetric(n, ctx.rng);
    RealMatrix b = random_symmetric(n, ctx.rng);
    b *= 0.3;
    ctx.expect(spectrum_inclusion(SelfAdjointMatrix(a), SelfAdjointMatrix(b)),
               "spectrum inclusion, rep=" + fmt(rep));
  }
  return ctx.finish("perturbation");
}

// ---------------------------------------------------------------------------

CheckResult suite_sort(Ctx ctx, FaultInjection inject) {
  // Injection point: all spectra in this suite pass through this wrapper.
  const auto sorted = [inject](const SelfAdjointMatrix& m) {
    RealVector v = eigenvalues_sorted(m);
    if (inject == FaultInjection::break_sort) v.reverseInPlace();
    return v;
  };

  {
    RealMatrix m = RealMatrix::Zero(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const RealVector ev = sorted(SelfAdjointMatrix(m));
    ctx.expect(ev[0] == 1.0 && ev[1] == 2.0 && ev[2] == 3.0, "diagonal matrix sorted");
  }
  {
    RealMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const RealVector ev = sorted(SelfAdjointMatrix(m));
    ctx.near(ev[0], -1.0, 1e-15, "involution low eigenvalue");
    ctx.near(ev[1], 1.0, 1e-15, "involution high eigenvalue");
  }
  {
    RealMatrix m(2, 2);
    m << 0.0, 1.0, 1.001, 0.0;
    ctx.throws([&] { eigenvalues_sorted(SelfAdjointMatrix(m)); },
               "non-self-adjoint input rejected");
  }

  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + static_cast<Index>(ctx.rng.uniform_below(39));
    const bool real = ctx.rng.uniform() < 0.5;
    const SelfAdjointMatrix m =
        real ? SelfAdjointMatrix(random_symmetric(n, ctx.rng))
             : SelfAdjointMatrix(random_hermitian(n, ctx.rng));
    const RealVector ev = sorted(m);
    bool ascending = true;
    for (Index i = 1; i < n; ++i) ascending = ascending && ev[i - 1] <= ev[i];
    ctx.expect(ascending, "ascending order, rep=" + fmt(rep));

    // Cross-check against a decomposition that is verified to reconstruct.
    const ComplexMatrix c = m.to_complex();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(c);
    const ComplexMatrix recon = es.eigenvectors() *
                                es.eigenvalues().asDiagonal().toDenseMatrix().cast<Complex>() *
                                es.eigenvectors().adjoint();
    ctx.expect((recon - c).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff()),
               "decomposition reconstructs, rep=" + fmt(rep));
    ctx.expect((ev - es.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12,
               "matches verified decomposition, rep=" + fmt(rep));
  }

  // A rank-r deformation moves at most r eigenvalues across any threshold.
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = 60;
    const Index r = 2;
    const WignerMatrix h = sample_wigner(n, SymmetryClass::real_symmetric,
                                         EntryDistribution::gaussian(), ctx.rng);
    const ComplexMatrix v = random_orthonormal(n, r, true, ctx.rng);
    RealVector d(r);
    d << -2.2, 3.1;
    const Deformation def(v, d);
    const RealVector before = sorted(h.entries);
    const RealVector after = sorted(deform(h, def));
    for (double t : {-1.0, 0.0, 1.0}) {
      const auto above = [t](const RealVector& ev) {
        Index c = 0;
        for (Index i = 0; i < ev.size(); ++i) c += ev[i] > t ? 1 : 0;
        return c;
      };
      ctx.expect(std::abs(above(before) - above(after)) <= r,
                 "rank-r interlacing at t=" + fmt(t) + ", rep=" + fmt(rep));
    }
  }

  {
    // Iterative extreme eigenvalues against the dense solver on a deformed
    // matrix large enough to take the iterative path.
    const Index n = 300;
    const WignerMatrix h = sample_wigner(n, SymmetryClass::real_symmetric,
                                         EntryDistribution::gaussian(), ctx.rng);
    ComplexMatrix v = basis_columns(n, {0});
    RealVector d(1);
    d << 2.5;
    const SelfAdjointMatrix a = deform(h, Deformation(v, d));
    const ExtremeEigenvalues ext = extreme_eigenvalues(a, 2, 2);
    ctx.expect(!ext.used_dense_path, "iterative path taken at n=300");
    const RealVector full = eigenvalues_sorted(a);
    ctx.near(ext.low[0], full[0], 1e-8, "lowest eigenvalue");
    ctx.near(ext.low[1], full[1], 1e-8, "second lowest eigenvalue");
    ctx.near(ext.high[0], full[n - 2], 1e-8, "second highest eigenvalue");
    ctx.near(ext.high[1], full[n - 1], 1e-8, "highest eigenvalue");
  }
  {
    const RealMatrix m = random_symmetric(40, ctx.rng);
    const ExtremeEigenvalues ext = extreme_eigenvalues(SelfAdjointMatrix(m), 1, 1);
    ctx.expect(ext.used_dense_path, "dense path taken at n=40");
    const RealVector full = eigenvalues_sorted(SelfAdjointMatrix(m));
    ctx.near(ext.low[0], full[0], 1e-12, "dense path low end");
    ctx.near(ext.high[0], full[39], 1e-12, "dense path high end");
  }

  {
    // Rigidity gauge: shape checks plus an order-of-magnitude report.
    const WignerMatrix h = sample_wigner(500, SymmetryClass::real_symmetric,
                                         EntryDistribution::gaussian(), ctx.rng);
    const RealVector ev = eigenvalues_sorted(h.entries);
    const RigidityGauge gauge = rigidity_gauge(ev);
    ctx.expect(gauge.deviations.size() == 500 && gauge.envelope.size() == 500,
               "gauge shapes");
    ctx.expect(gauge.envelope.minCoeff() > 0.0, "gauge envelope positive");
    ctx.expect(gauge.deviations.allFinite(), "gauge deviations finite");
    RealVector bad(3);
    bad << 1.0, 0.5, 2.0;
    ctx.throws([&] { rigidity_gauge(bad); }, "unsorted input rejected");
  }
  return ctx.finish("sort");
}

}  // namespace

// ---------------------------------------------------------------------------

FaultInjection parse_injection(const std::string& name) {
  if (name.empty() || name == "none") return FaultInjection::none;
  if (name == "flip-p-sign") return FaultInjection::flip_p_sign;
  if (name == "drop-e-term") return FaultInjection::drop_e_term;
  if (name == "break-sort") return FaultInjection::break_sort;
  throw std::invalid_argument("unknown fault injection: " + name);
}

std::string injection_name(FaultInjection inject) {
  switch (inject) {
    case FaultInjection::none: return "none";
    case FaultInjection::flip_p_sign: return "flip-p-sign";
    case FaultInjection::drop_e_term: return "drop-e-term";
    case FaultInjection::break_sort: return "break-sort";
  }
  return "none";
}

std::vector<std::string> suite_names() {
  return {"stieltjes",  "moments",      "partition", "tensors", "psd",
          "sampler",    "projection",   "perturbation", "sort"};
}

std::vector<CheckResult> run_check_suites(const CheckOptions& options) {
  using Runner = std::function<CheckResult(Ctx)>;
  const FaultInjection inject = options.inject;
  const std::vector<std::pair<std::string, Runner>> suites{
      {"stieltjes", [](Ctx c) { return suite_stieltjes(std::move(c)); }},
      {"moments", [](Ctx c) { return suite_moments(std::move(c)); }},
      {"partition", [](Ctx c) { return suite_partition(std::move(c)); }},
      {"tensors", [inject](Ctx c) { return suite_tensors(std::move(c), inject); }},
      {"psd", [inject](Ctx c) { return suite_psd(std::move(c), inject); }},
      {"sampler", [](Ctx c) { return suite_sampler(std::move(c)); }},
      {"projection", [](Ctx c) { return suite_projection(std::move(c)); }},
      {"perturbation", [](Ctx c) { return suite_perturbation(std::move(c)); }},
      {"sort", [inject](Ctx c) { return suite_sort(std::move(c), inject); }},
  };

  std::vector<CheckResult> results;
  std::uint64_t ordinal = 0;
  for (const auto& [name, runner] : suites) {
    ++ordinal;
    if (!options.suite_filter.empty() && options.suite_filter != name) continue;
    Ctx ctx(RandomStream::derive(options.seed, ordinal, kSuitePurpose));
    try {
      results.push_back(runner(std::move(ctx)));
    } catch (const std::exception& e) {
      CheckResult res;
      res.suite = name;
      res.passed = false;
      res.detail = std::string("unexpected exception: ") + e.what();
      results.push_back(res);
    }
  }
  return results;
}

}  // namespace rmt::checks
