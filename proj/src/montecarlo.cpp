#include "rmt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rmt/spectra.hpp"

namespace rmt {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(trial) over 0..trials-1 on a small worker pool.  Results are
/// written into per-trial slots by the body, so scheduling order is
/// irrelevant to the output.
template <typename Body>
void parallel_trials(int trials, int threads, const Body& body) {
  threads = std::min(std::max(threads, 1), std::max(trials, 1));
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= trials) return;
        body(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

struct TrialOutcome {
  std::vector<double> values;
  bool failed = false;
  bool dense_fallback = false;
};

void assemble(TrialSet& out, std::vector<TrialOutcome>& rows, int trials) {
  int kept = 0;
  for (const auto& row : rows) {
    if (row.failed) ++out.failed_trials;
    if (row.dense_fallback) ++out.dense_fallbacks;
    if (!row.failed) ++kept;
  }
  const Index m = static_cast<Index>(out.indices.size());
  out.values.resize(kept, m);
  Index at = 0;
  for (int t = 0; t < trials; ++t) {
    if (rows[t].failed) continue;
    for (Index c = 0; c < m; ++c) out.values(at, c) = rows[t].values[c];
    ++at;
  }
}

double column_moment(const RealMatrix& values, Index c, double center, int p) {
  double s = 0.0;
  for (Index t = 0; t < values.rows(); ++t)
    s += std::pow(values(t, c) - center, p);
  return values.rows() > 0 ? s / static_cast<double>(values.rows()) : 0.0;
}

RealMatrix correlation_matrix(const RealMatrix& values) {
  const Index m = values.cols();
  const Index t = values.rows();
  RealMatrix corr = RealMatrix::Identity(m, m);
  if (t < 2) return corr;
  RealVector mean(m), sd(m);
  for (Index c = 0; c < m; ++c) {
    mean[c] = values.col(c).mean();
    sd[c] = std::sqrt((values.col(c).array() - mean[c]).square().sum() /
                      static_cast<double>(t));
  }
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      if (sd[a] == 0.0 || sd[b] == 0.0) {
        corr(a, b) = a == b ? 1.0 : 0.0;
        continue;
      }
      const double cov = ((values.col(a).array() - mean[a]) *
                          (values.col(b).array() - mean[b]))
                             .sum() /
                         static_cast<double>(t);
      corr(a, b) = cov / (sd[a] * sd[b]);
    }
  return corr;
}

}  // namespace

ReferenceSpec ExperimentConfig::reference_spec() const {
  ReferenceSpec spec{deformation, law, sym, cp, delta_cutoff, include_e_term};
  return spec;
}

void ExperimentConfig::validate() const {
  if (n < 3) throw std::invalid_argument("config: n >= 3 required");
  if (trials < 1) throw std::invalid_argument("config: trials >= 1 required");
  if (deformation.n() != n)
    throw std::invalid_argument("config: deformation dimension differs from n");
  if (cp.n != n)
    throw std::invalid_argument("config: control parameters carry a different n");
  if (threads < 0) throw std::invalid_argument("config: threads >= 0 required");
}

TrialSet run_simulation_trials(const ExperimentConfig& config) {
  config.validate();
  const RealVector& d = config.deformation.d();
  TrialSet out;
  out.partition = partition_fine(d, config.cp);
  out.indices = out.partition.covered();
  for (int idx : out.indices)
    for (std::size_t b = 0; b < out.partition.blocks.size(); ++b)
      for (int member : out.partition.blocks[b])
        if (member == idx) out.block_of.push_back(static_cast<int>(b));

  if (out.indices.empty()) {
    out.values.resize(0, 0);
    return out;
  }

  // The alpha positions covered by the partition decide how many extreme
  // eigenvalues are needed from each spectral edge.
  const int r = static_cast<int>(d.size());
  Index k_low = 0, k_high = 0;
  for (int idx : out.indices) {
    if (d[idx - 1] < 0.0)
      k_low = std::max<Index>(k_low, idx);
    else
      k_high = std::max<Index>(k_high, r - idx + 1);
  }

  const bool use_extreme =
      config.solver == ExperimentConfig::Solver::extreme ||
      (config.solver == ExperimentConfig::Solver::automatic && config.n > 4000);

  std::vector<TrialOutcome> rows(config.trials);
  parallel_trials(config.trials, resolve_threads(config.threads), [&](int t) {
    TrialOutcome& row = rows[t];
    try {
      RandomStream rng = RandomStream::derive(config.master_seed,
                                              static_cast<std::uint64_t>(t),
                                              stream_purpose::simulation);
      const WignerMatrix h = sample_wigner(config.n, config.sym, config.law, rng);
      const SelfAdjointMatrix m = deform(h, config.deformation);

      PartialSpectrum spectrum;
      spectrum.n = config.n;
      if (use_extreme) {
        const ExtremeEigenvalues ex = extreme_eigenvalues(m, k_low, k_high);
        spectrum.low = ex.low;
        spectrum.high = ex.high;
        row.dense_fallback = ex.used_dense_path;
      } else {
        const RealVector all = eigenvalues_sorted(m);
        spectrum.low = all;
        spectrum.high = all;
      }
      const RescaledOutliers z =
          extract_and_rescale(spectrum, out.partition, d);
      row.values = z.values;
    } catch (const std::exception&) {
      row.failed = true;
    }
  });

  assemble(out, rows, config.trials);
  return out;
}

TrialSet run_reference_trials(const ExperimentConfig& config) {
  config.validate();
  const ReferenceEnsemble ensemble(config.reference_spec());

  TrialSet out;
  out.partition = ensemble.partition();
  out.indices = out.partition.covered();
  for (int idx : out.indices)
    for (std::size_t b = 0; b < out.partition.blocks.size(); ++b)
      for (int member : out.partition.blocks[b])
        if (member == idx) out.block_of.push_back(static_cast<int>(b));

  std::vector<TrialOutcome> rows(config.trials);
  parallel_trials(config.trials, resolve_threads(config.threads), [&](int t) {
    TrialOutcome& row = rows[t];
    try {
      RandomStream proj = RandomStream::derive(config.master_seed,
                                               static_cast<std::uint64_t>(t),
                                               stream_purpose::reference_projection);
      RandomStream gauss = RandomStream::derive(config.master_seed,
                                                static_cast<std::uint64_t>(t),
                                                stream_purpose::reference_gaussian);
      const ReferenceSample s = ensemble.draw(proj, gauss);
      row.values = s.xi.values;
    } catch (const std::exception&) {
      row.failed = true;
    }
  });

  assemble(out, rows, config.trials);
  return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double worst = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < sa.size() && ib < sb.size()) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    const double fa = static_cast<double>(ia) / sa.size();
    const double fb = static_cast<double>(ib) / sb.size();
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("wasserstein1: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  // Integrate |F_a - F_b| over the merged support.
  std::vector<double> grid;
  grid.reserve(sa.size() + sb.size());
  grid.insert(grid.end(), sa.begin(), sa.end());
  grid.insert(grid.end(), sb.begin(), sb.end());
  std::sort(grid.begin(), grid.end());
  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    while (ia < sa.size() && sa[ia] <= grid[g]) ++ia;
    while (ib < sb.size() && sb[ib] <= grid[g]) ++ib;
    const double fa = static_cast<double>(ia) / sa.size();
    const double fb = static_cast<double>(ib) / sb.size();
    total += std::abs(fa - fb) * (grid[g + 1] - grid[g]);
  }
  return total;
}

ComparisonReport compare(const TrialSet& sim, const TrialSet& ref) {
  if (sim.indices != ref.indices || !(sim.partition == ref.partition))
    throw std::invalid_argument("compare: simulation and reference partitions differ");
  if (sim.values.rows() < 2 || ref.values.rows() < 2)
    throw std::invalid_argument("compare: need at least two trials on each side");

  ComparisonReport rep;
  rep.sim_trials = sim.values.rows();
  rep.ref_trials = ref.values.rows();
  rep.sim_failures = sim.failed_trials;
  rep.ref_failures = ref.failed_trials;

  const Index m = static_cast<Index>(sim.indices.size());
  for (Index c = 0; c < m; ++c) {
    CoordinateComparison cc;
    cc.index = sim.indices[c];
    cc.block = sim.block_of[c];
    std::vector<double> a(sim.values.col(c).begin(), sim.values.col(c).end());
    std::vector<double> b(ref.values.col(c).begin(), ref.values.col(c).end());
    cc.ks = ks_distance(a, b);
    cc.w1 = wasserstein1(a, b);
    cc.sim_mean = sim.values.col(c).mean();
    cc.ref_mean = ref.values.col(c).mean();
    cc.sim_var = column_moment(sim.values, c, cc.sim_mean, 2);
    cc.ref_var = column_moment(ref.values, c, cc.ref_mean, 2);
    const double ssd = std::sqrt(std::max(cc.sim_var, 1e-300));
    const double rsd = std::sqrt(std::max(cc.ref_var, 1e-300));
    cc.sim_skew = column_moment(sim.values, c, cc.sim_mean, 3) / (ssd * ssd * ssd);
    cc.ref_skew = column_moment(ref.values, c, cc.ref_mean, 3) / (rsd * rsd * rsd);
    cc.sim_kurt = column_moment(sim.values, c, cc.sim_mean, 4) / (ssd * ssd * ssd * ssd);
    cc.ref_kurt = column_moment(ref.values, c, cc.ref_mean, 4) / (rsd * rsd * rsd * rsd);
    rep.coordinates.push_back(cc);
  }

  Index offset = 0;
  for (std::size_t b = 0; b < sim.partition.blocks.size(); ++b) {
    const Index sz = static_cast<Index>(sim.partition.blocks[b].size());
    if (sz >= 2) {
      BlockComparison bc;
      bc.block = static_cast<int>(b);
      bc.indices = sim.partition.blocks[b];
      const auto min_gaps = [&](const RealMatrix& values) {
        std::vector<double> gaps(values.rows());
        for (Index t = 0; t < values.rows(); ++t) {
          double mg = std::numeric_limits<double>::infinity();
          for (Index c = 1; c < sz; ++c)
            mg = std::min(mg, values(t, offset + c) - values(t, offset + c - 1));
          gaps[t] = mg;
        }
        return gaps;
      };
      bc.sim_min_gaps = min_gaps(sim.values);
      bc.ref_min_gaps = min_gaps(ref.values);
      bc.min_gap_ks = ks_distance(bc.sim_min_gaps, bc.ref_min_gaps);
      rep.blocks.push_back(std::move(bc));
    }
    offset += sz;
  }

  rep.sim_correlation = correlation_matrix(sim.values);
  rep.ref_correlation = correlation_matrix(ref.values);
  return rep;
}

}  // namespace rmt
