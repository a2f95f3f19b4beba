#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmt/ensemble.hpp"
#include "rmt/outliers.hpp"
#include "rmt/reference.hpp"

namespace rmt {

/// Full description of one Monte Carlo experiment.
struct ExperimentConfig {
  enum class Solver { automatic, full, extreme };

  Index n = 0;
  int trials = 0;
  std::uint64_t master_seed = 0;
  Deformation deformation;
  EntryDistribution law = EntryDistribution::gaussian();
  SymmetryClass sym = SymmetryClass::real_symmetric;
  ControlParams cp;
  double delta_cutoff = 0.0;  // <= 0 selects 1 / log(n)
  bool include_e_term = true;
  Solver solver = Solver::automatic;
  int threads = 0;  // 0 selects the hardware concurrency

  ReferenceSpec reference_spec() const;
  void validate() const;
};

/// Rescaled observations of all trials: row t holds the values of trial t in
/// covered-index order.  Trials whose eigensolver failed are dropped from the
/// matrix and only counted.
struct TrialSet {
  Partition partition;
  std::vector<int> indices;
  std::vector<int> block_of;
  RealMatrix values;  // trials x covered
  int dense_fallbacks = 0;
  int failed_trials = 0;
};

/// Samples deformed Wigner matrices and extracts the rescaled outliers.
/// Trials are distributed over worker threads; every trial derives its own
/// random stream from (master_seed, trial, purpose), so results do not depend
/// on the number of threads.
TrialSet run_simulation_trials(const ExperimentConfig& config);

/// Samples the matched reference law (Upsilon + Psi + shift eigenvalues).
TrialSet run_reference_trials(const ExperimentConfig& config);

/// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Order-1 Wasserstein distance between empirical distributions, computed as
/// the integral of |F_a - F_b|; sample sizes may differ.
double wasserstein1(std::span<const double> a, std::span<const double> b);

/// Per-coordinate and per-block comparison between simulation and reference
/// samples.  Purely descriptive: thresholds are the caller's business.
struct CoordinateComparison {
  int index = 0;  // covered index
  int block = 0;
  double ks = 0.0;
  double w1 = 0.0;
  double sim_mean = 0.0, sim_var = 0.0, sim_skew = 0.0, sim_kurt = 0.0;
  double ref_mean = 0.0, ref_var = 0.0, ref_skew = 0.0, ref_kurt = 0.0;
};

struct BlockComparison {
  int block = 0;
  std::vector<int> indices;
  double min_gap_ks = 0.0;                  // blocks of size >= 2 only
  std::vector<double> sim_min_gaps;
  std::vector<double> ref_min_gaps;
};

struct ComparisonReport {
  long sim_trials = 0;
  long ref_trials = 0;
  int sim_failures = 0;
  int ref_failures = 0;
  std::vector<CoordinateComparison> coordinates;
  std::vector<BlockComparison> blocks;
  RealMatrix sim_correlation;  // across all covered coordinates
  RealMatrix ref_correlation;
};

ComparisonReport compare(const TrialSet& sim, const TrialSet& ref);

}  // namespace rmt
