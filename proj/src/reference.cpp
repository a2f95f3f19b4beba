#include "rmt/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "rmt/semicircle.hpp"
#include "rmt/spectra.hpp"

namespace rmt {

namespace {

double block_prefactor(double d_pi) {
  const double ad = std::abs(d_pi);
  return std::sqrt(ad - 1.0) * (ad + 1.0) / (d_pi * d_pi);
}

void check_psd(const CovarianceTensor& t, const char* what) {
  const double tr = t.pair_trace();
  const double floor = -1e-10 * std::max(tr, 0.0) - 1e-13;
  if (t.min_pair_eigenvalue() < floor)
    throw std::runtime_error(std::string(what) +
                             ": covariance tensor is indefinite beyond tolerance");
}

}  // namespace

double ReferenceSpec::delta() const {
  const Index n = deformation.n();
  const double value =
      delta_cutoff > 0.0 ? delta_cutoff : 1.0 / std::log(static_cast<double>(n));
  // The truncation level must dominate phi^(-1) but stay o(1).
  if (value < 1.0 / control_parameter(n) || value >= 1.0)
    throw std::invalid_argument(
        "ReferenceSpec: delta_cutoff must lie in [1/phi(n), 1)");
  return value;
}

CovarianceTensor psi_covariance_single(const ReferenceSpec& spec,
                                       const std::vector<int>& block) {
  const double d_pi = block_reference_d(block, spec.deformation.d());
  const double ad = std::abs(d_pi);
  if (ad <= 1.0)
    throw std::invalid_argument("psi_covariance_single: block strength |d| <= 1");

  const Index n = spec.deformation.n();
  const Index r = spec.deformation.rank();
  const ComplexMatrix vd = truncate_v(spec.deformation.v(), spec.delta());
  const MomentTensors mt = moment_tensors(spec.law, n, spec.sym);

  const double d2 = d_pi * d_pi;
  const double w = (ad + 1.0) * (ad + 1.0) * (ad - 1.0);

  CovarianceTensor t = tensor_delta(r, spec.sym);
  t.scale(Complex((ad + 1.0) / d2, 0.0));
  t.add_scaled(Complex(-w / (d2 * d2), 0.0), tensor_p(vd.adjoint() * vd, spec.sym));
  t.add_scaled(Complex(w / (d2 * d2 * d_pi), 0.0), tensor_q(spec.deformation.v(), mt));
  t.add_scaled(Complex(w / (d2 * d2 * d2), 0.0),
               tensor_r(spec.deformation.v(), mt, spec.sym));
  if (spec.include_e_term) {
    CovarianceTensor e = tensor_delta(r, spec.sym);
    t.add_scaled(Complex(1.0 / control_parameter(n), 0.0), e);
  }
  check_psd(t, "psi_covariance_single");
  return t;
}

CovarianceTensor psi_covariance_joint(const ReferenceSpec& spec) {
  const RealVector& d = spec.deformation.d();
  const Partition part = partition_fine(d, spec.cp);
  const std::vector<int> covered = part.covered();
  const Index m = static_cast<Index>(covered.size());

  std::vector<int> block_of(covered.size());
  std::vector<double> d_pi(part.blocks.size());
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    d_pi[b] = block_reference_d(part.blocks[b], d);
    if (std::abs(d_pi[b]) <= 1.0)
      throw std::invalid_argument("psi_covariance_joint: block strength |d| <= 1");
  }
  for (std::size_t c = 0; c < covered.size(); ++c)
    for (std::size_t b = 0; b < part.blocks.size(); ++b)
      for (int idx : part.blocks[b])
        if (idx == covered[c]) block_of[c] = static_cast<int>(b);

  const Index n = spec.deformation.n();
  const ComplexMatrix vd = truncate_v(spec.deformation.v(), spec.delta());
  const MomentTensors mt = moment_tensors(spec.law, n, spec.sym);
  const CovarianceTensor p_full = tensor_p(vd.adjoint() * vd, spec.sym);
  const CovarianceTensor w_full = tensor_w(spec.deformation.v(), mt);
  const CovarianceTensor r_full = tensor_r(spec.deformation.v(), mt, spec.sym);
  const CovarianceTensor delta_full = tensor_delta(spec.deformation.rank(), spec.sym);
  const double e_weight = spec.include_e_term ? 1.0 / control_parameter(n) : 0.0;
  const bool real_class = spec.sym == SymmetryClass::real_symmetric;

  CovarianceTensor t(m);
  for (Index p = 0; p < m; ++p)
    for (Index q = 0; q < m; ++q)
      for (Index u = 0; u < m; ++u)
        for (Index w = 0; w < m; ++w) {
          const int bp = block_of[p], bq = block_of[q];
          const int bu = block_of[u], bw = block_of[w];
          if (bp != bq || bu != bw) continue;  // entries outside blocks vanish
          const Index gi = covered[p] - 1, gj = covered[q] - 1;
          const Index gk = covered[u] - 1, gl = covered[w] - 1;

          Complex val(0.0, 0.0);
          if (bp == bu) {
            const double ad = std::abs(d_pi[bp]);
            const double self = (ad + 1.0) / (d_pi[bp] * d_pi[bp]) + e_weight;
            val += self * delta_full.at(gi, gj, gk, gl);
          }
          const double pref = block_prefactor(d_pi[bp]) * block_prefactor(d_pi[bu]);
          Complex cross = -p_full.at(gi, gj, gk, gl);
          cross += r_full.at(gi, gj, gk, gl) / (d_pi[bp] * d_pi[bu]);
          cross += w_full.at(gi, gj, gk, gl) / d_pi[bu];
          cross += w_full.at(gk, gl, gi, gj) / d_pi[bp];
          val += pref * cross;
          if (real_class) val = Complex(val.real(), 0.0);
          t.at(p, q, u, w) = val;
        }
  check_psd(t, "psi_covariance_joint");
  return t;
}

ComplexMatrix reference_shift(const ReferenceSpec& spec) {
  const RealVector& d = spec.deformation.d();
  const Partition part = partition_fine(d, spec.cp);
  const std::vector<int> covered = part.covered();
  const Index m = static_cast<Index>(covered.size());
  const double root_n = std::sqrt(static_cast<double>(spec.deformation.n()));

  ComplexMatrix shift = ComplexMatrix::Zero(m, m);
  Index pos = 0;
  for (const auto& block : part.blocks) {
    const double d_pi = block_reference_d(block, d);
    const double ad = std::abs(d_pi);
    const double scale = root_n * std::sqrt(ad - 1.0) * (ad + 1.0);
    for (int idx : block) {
      shift(pos, pos) = Complex(scale * (1.0 / d_pi - 1.0 / d[idx - 1]), 0.0);
      ++pos;
    }
  }
  return shift;
}

ReferenceEnsemble::ReferenceEnsemble(const ReferenceSpec& spec)
    : spec_(spec),
      partition_(partition_fine(spec.deformation.d(), spec.cp)),
      covered_(partition_.covered()) {
  if (covered_.empty())
    throw std::invalid_argument("ReferenceEnsemble: no outliers under these controls");

  block_of_.resize(covered_.size());
  d_pi_.resize(partition_.blocks.size());
  for (std::size_t b = 0; b < partition_.blocks.size(); ++b) {
    d_pi_[b] = block_reference_d(partition_.blocks[b], spec_.deformation.d());
    for (std::size_t c = 0; c < covered_.size(); ++c)
      for (int idx : partition_.blocks[b])
        if (idx == covered_[c]) block_of_[c] = static_cast<int>(b);
  }

  v_delta_ = truncate_v(spec_.deformation.v(), spec_.delta());
  const MomentTensors mt =
      moment_tensors(spec_.law, spec_.deformation.n(), spec_.sym);
  s_ = tensor_s(spec_.deformation.v(), mt);
  joint_ = psi_covariance_joint(spec_);
  sampler_ = std::make_shared<const HermitianGaussianSampler>(joint_, spec_.sym);
  shift_ = reference_shift(spec_);
}

ReferenceSample ReferenceEnsemble::draw(RandomStream& proj_rng,
                                        RandomStream& gauss_rng) const {
  const Index m = static_cast<Index>(covered_.size());
  const double root_n = std::sqrt(static_cast<double>(spec_.deformation.n()));

  const SelfAdjointMatrix q_draw =
      projected_quadratic_form(v_delta_, spec_.law, spec_.sym, proj_rng);
  const ComplexMatrix q = q_draw.to_complex();
  const SelfAdjointMatrix psi_draw = sampler_->sample(gauss_rng);
  const ComplexMatrix psi = psi_draw.to_complex();

  ReferenceSample out;
  out.indices = covered_;
  out.block_of = block_of_;
  out.upsilon = ComplexMatrix::Zero(m, m);
  out.psi = psi;
  out.shift = shift_;

  // Upsilon blocks: all of them reuse the single projected draw q.
  Index offset = 0;
  for (std::size_t b = 0; b < partition_.blocks.size(); ++b) {
    const auto& block = partition_.blocks[b];
    const Index sz = static_cast<Index>(block.size());
    const double d_pi = d_pi_[b];
    const double ad = std::abs(d_pi);
    const double pref = (ad + 1.0) * std::sqrt(ad - 1.0);
    const double d2 = d_pi * d_pi;
    for (Index x = 0; x < sz; ++x)
      for (Index y = 0; y < sz; ++y) {
        const Index gi = block[x] - 1, gj = block[y] - 1;
        out.upsilon(offset + x, offset + y) =
            pref * (root_n * q(gi, gj) / d2 + s_(gi, gj) / (d2 * d2));
      }
    offset += sz;
  }

  // Eigenvalues per block of Upsilon + Psi + shift.
  out.xi.indices = covered_;
  out.xi.block_of = block_of_;
  out.xi.values.resize(covered_.size());
  offset = 0;
  for (std::size_t b = 0; b < partition_.blocks.size(); ++b) {
    const Index sz = static_cast<Index>(partition_.blocks[b].size());
    ComplexMatrix blockmat = out.upsilon.block(offset, offset, sz, sz) +
                             psi.block(offset, offset, sz, sz) +
                             shift_.block(offset, offset, sz, sz);
    const RealVector evs = eigenvalues_sorted(SelfAdjointMatrix(std::move(blockmat)));
    for (Index x = 0; x < sz; ++x) out.xi.values[offset + x] = evs[x];
    offset += sz;
  }
  return out;
}

ComplexMatrix build_upsilon(const ReferenceSpec& spec, RandomStream& rng) {
  ReferenceEnsemble ens(spec);
  RandomStream gauss(0);  // unused by the Upsilon part
  ReferenceSample s = ens.draw(rng, gauss);
  return s.upsilon;
}

ReferenceSample reference_eigenvalues(const ReferenceSpec& spec, RandomStream& rng) {
  ReferenceEnsemble ens(spec);
  return ens.draw(rng, rng);
}

}  // namespace rmt
