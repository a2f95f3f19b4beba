#include "rmt/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rmt/checks.hpp"
#include "rmt/manifest.hpp"
#include "rmt/reference.hpp"
#include "rmt/table_io.hpp"

namespace rmt::cli {
namespace {

namespace fs = std::filesystem;

void apply_thread_env(ExperimentConfig& experiment) {
  const char* env = std::getenv("OUTLIERS_THREADS");
  if (!env) return;
  char* end = nullptr;
  const long t = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || t < 0)
    throw ConfigError("OUTLIERS_THREADS", "must be a non-negative integer");
  experiment.threads = static_cast<int>(t);
}

void require_outliers(const TrialSet& trials) {
  if (trials.partition.covered_size() == 0)
    throw ConfigError("deformation.d",
                      "no strength passes the outlier detection threshold");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

RunManifest make_manifest(const std::string& command, const LoadedConfig& config,
                          const TrialSet& trials, std::vector<std::string> outputs) {
  RunManifest m;
  m.command = command;
  m.config_hash = config.hash;
  m.timestamp = iso_timestamp_now();
  m.seed = config.experiment.master_seed;
  m.output_paths = std::move(outputs);
  m.config = config.canonical;
  m.n = config.experiment.n;
  m.trials_requested = config.experiment.trials;
  m.trials_kept = trials.values.rows();
  m.failed_trials = trials.failed_trials;
  m.dense_fallbacks = trials.dense_fallbacks;
  return m;
}

void print_run_summary(std::ostream& out, const std::string& command,
                       const RunManifest& m, const std::string& dir) {
  out << command << ": kept " << m.trials_kept << "/" << m.trials_requested
      << " trials";
  if (m.failed_trials > 0) out << " (" << m.failed_trials << " failed)";
  if (m.dense_fallbacks > 0) out << " (" << m.dense_fallbacks << " dense fallbacks)";
  out << ", config " << m.config_hash << " -> " << dir << "\n";
}

/// Rebuilds a TrialSet from an output directory; the column labels must match
/// the partition recorded next to the samples.
TrialSet load_trials(const std::string& dir, const std::string& symbol) {
  const RunManifest manifest = read_manifest(dir);
  std::string csv_name;
  for (const std::string& path : manifest.output_paths)
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") csv_name = path;
  if (csv_name.empty())
    throw ConfigError("", "manifest in " + dir + " lists no sample CSV");

  TrialSet trials;
  trials.partition = partition_from_json(read_json_file(dir + "/partition.json"));
  for (std::size_t b = 0; b < trials.partition.blocks.size(); ++b)
    for (int idx : trials.partition.blocks[b]) {
      trials.indices.push_back(idx);
      trials.block_of.push_back(static_cast<int>(b));
    }
  // covered() is ascending; blocks are ordered by smallest index, so the
  // flattened order above is already ascending as well.
  trials.failed_trials = manifest.failed_trials;
  trials.dense_fallbacks = manifest.dense_fallbacks;

  const SampleTable table = read_samples_csv(dir + "/" + csv_name);
  const std::vector<std::string> expected = sample_column_names(trials, symbol);
  if (table.columns != expected) {
    std::string want, got;
    for (const std::string& s : expected) want += (want.empty() ? "" : ",") + s;
    for (const std::string& s : table.columns) got += (got.empty() ? "" : ",") + s;
    throw ConfigError("", dir + ": sample columns [" + got +
                              "] do not match the partition [" + want + "]");
  }
  trials.values = table.values;
  return trials;
}

void check_compatible(const RunManifest& sim, const RunManifest& ref,
                      const TrialSet& sim_trials, const TrialSet& ref_trials) {
  const auto dim = [](const RunManifest& m) {
    return m.config.at("montecarlo").at("n").get<long>();
  };
  const auto rank = [](const RunManifest& m) {
    return m.config.at("deformation").at("d").size();
  };
  if (dim(sim) != dim(ref))
    throw ConfigError("", "incompatible runs: n = " + std::to_string(dim(sim)) +
                              " vs " + std::to_string(dim(ref)));
  if (rank(sim) != rank(ref))
    throw ConfigError("", "incompatible runs: rank " + std::to_string(rank(sim)) +
                              " vs " + std::to_string(rank(ref)));
  if (!(sim_trials.partition == ref_trials.partition))
    throw ConfigError("", "incompatible runs: the block partitions differ");
}

void write_cdf_csv(const std::string& path, const ComparisonReport& report,
                   const TrialSet& sim, const TrialSet& ref) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "coordinate,side,x,cdf\n";
  for (std::size_t c = 0; c < report.coordinates.size(); ++c) {
    const CoordinateComparison& cc = report.coordinates[c];
    const std::string label =
        std::to_string(cc.block + 1) + ":" + std::to_string(cc.index);
    for (int side = 0; side < 2; ++side) {
      const RealMatrix& values = side == 0 ? sim.values : ref.values;
      std::vector<double> xs(values.rows());
      for (Index t = 0; t < values.rows(); ++t) xs[t] = values(t, static_cast<Index>(c));
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k < xs.size(); ++k)
        out << label << "," << (side == 0 ? "sim" : "ref") << ","
            << format_double(xs[k]) << ","
            << format_double(static_cast<double>(k + 1) / xs.size()) << "\n";
    }
  }
}

void write_histogram_csv(const std::string& path, const ComparisonReport& report,
                         const TrialSet& sim, const TrialSet& ref) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "coordinate,side,bin_lo,bin_hi,count,density\n";
  const int bins = 40;
  for (std::size_t c = 0; c < report.coordinates.size(); ++c) {
    const CoordinateComparison& cc = report.coordinates[c];
    const std::string label =
        std::to_string(cc.block + 1) + ":" + std::to_string(cc.index);
    const Index col = static_cast<Index>(c);
    double lo = std::min(sim.values.col(col).minCoeff(), ref.values.col(col).minCoeff());
    double hi = std::max(sim.values.col(col).maxCoeff(), ref.values.col(col).maxCoeff());
    if (hi <= lo) hi = lo + 1.0;
    const double width = (hi - lo) / bins;
    for (int side = 0; side < 2; ++side) {
      const RealMatrix& values = side == 0 ? sim.values : ref.values;
      std::vector<long> counts(bins, 0);
      for (Index t = 0; t < values.rows(); ++t) {
        int b = static_cast<int>((values(t, col) - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
      }
      for (int b = 0; b < bins; ++b)
        out << label << "," << (side == 0 ? "sim" : "ref") << ","
            << format_double(lo + b * width) << "," << format_double(lo + (b + 1) * width)
            << "," << counts[b] << ","
            << format_double(counts[b] / (values.rows() * width)) << "\n";
    }
  }
}

void write_mingap_csv(const std::string& path, const ComparisonReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "block,side,value\n";
  for (const BlockComparison& b : report.blocks) {
    for (double v : b.sim_min_gaps)
      out << (b.block + 1) << ",sim," << format_double(v) << "\n";
    for (double v : b.ref_min_gaps)
      out << (b.block + 1) << ",ref," << format_double(v) << "\n";
  }
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides, std::ostream& out) {
  LoadedConfig config = load_config(config_path, overrides);
  apply_thread_env(config.experiment);
  const TrialSet trials = run_simulation_trials(config.experiment);
  require_outliers(trials);

  fs::create_directories(out_dir);
  write_samples_csv(out_dir + "/zeta.csv", trials, "zeta");
  write_json_file(out_dir + "/partition.json", partition_to_json(trials.partition));
  const RunManifest manifest =
      make_manifest("simulate", config, trials, {"zeta.csv", "partition.json"});
  write_manifest(out_dir, manifest);
  print_run_summary(out, "simulate", manifest, out_dir);
  return kExitSuccess;
}

int cmd_reference(const std::string& config_path, const std::string& out_dir,
                  const CliOverrides& overrides, std::ostream& out) {
  LoadedConfig config = load_config(config_path, overrides);
  apply_thread_env(config.experiment);
  const TrialSet trials = run_reference_trials(config.experiment);
  require_outliers(trials);

  fs::create_directories(out_dir);
  write_samples_csv(out_dir + "/xi.csv", trials, "xi");
  write_json_file(out_dir + "/partition.json", partition_to_json(trials.partition));

  // The assembled law itself, entry by entry: the joint Gaussian covariance,
  // the deterministic matrices and the truncation level actually used.
  const ReferenceSpec spec = config.experiment.reference_spec();
  const ReferenceEnsemble ensemble(spec);
  std::vector<double> block_strengths;
  for (const std::vector<int>& block : ensemble.partition().blocks)
    block_strengths.push_back(block_reference_d(block, spec.deformation.d()));
  nlohmann::json tensors;
  tensors["delta_cutoff"] = spec.delta();
  tensors["joint_covariance"] = tensor_to_json(ensemble.joint_covariance());
  tensors["s_matrix"] = complex_matrix_to_json(ensemble.s_matrix());
  tensors["shift"] = complex_matrix_to_json(reference_shift(spec));
  tensors["blocks"] = ensemble.partition().blocks;
  tensors["block_reference_d"] = block_strengths;
  write_json_file(out_dir + "/tensors.json", tensors);

  const RunManifest manifest = make_manifest(
      "reference", config, trials, {"xi.csv", "partition.json", "tensors.json"});
  write_manifest(out_dir, manifest);
  print_run_summary(out, "reference", manifest, out_dir);
  return kExitSuccess;
}

int cmd_compare(const std::string& sim_dir, const std::string& ref_dir,
                const std::string& out_dir, std::ostream& out) {
  const RunManifest sim_manifest = read_manifest(sim_dir);
  const RunManifest ref_manifest = read_manifest(ref_dir);
  const TrialSet sim = load_trials(sim_dir, "zeta");
  const TrialSet ref = load_trials(ref_dir, "xi");
  check_compatible(sim_manifest, ref_manifest, sim, ref);

  ComparisonReport report;
  try {
    report = compare(sim, ref);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }

  fs::create_directories(out_dir);
  nlohmann::json j = report_to_json(report);
  j["sim_config_hash"] = sim_manifest.config_hash;
  j["ref_config_hash"] = ref_manifest.config_hash;
  write_json_file(out_dir + "/report.json", j);
  write_cdf_csv(out_dir + "/cdf.csv", report, sim, ref);
  write_histogram_csv(out_dir + "/histogram.csv", report, sim, ref);
  write_mingap_csv(out_dir + "/mingap.csv", report);

  out << "compare: " << report.sim_trials << " simulation vs " << report.ref_trials
      << " reference trials over " << report.coordinates.size() << " coordinates -> "
      << out_dir << "\n";
  for (const CoordinateComparison& c : report.coordinates) {
    out << "  [" << (c.block + 1) << ":" << c.index << "] ks=" << c.ks
        << " w1=" << c.w1 << " mean " << c.sim_mean << " vs " << c.ref_mean
        << ", var " << c.sim_var << " vs " << c.ref_var << "\n";
  }
  return kExitSuccess;
}

int cmd_check(const std::string& suite_filter, const std::string& inject,
              std::ostream& out) {
  checks::CheckOptions options;
  options.suite_filter = suite_filter;
  try {
    options.inject = checks::parse_injection(inject);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--inject", e.what());
  }

  const std::vector<checks::CheckResult> results = checks::run_check_suites(options);
  if (results.empty()) {
    std::string names;
    for (const std::string& name : checks::suite_names())
      names += (names.empty() ? "" : ", ") + name;
    throw ConfigError("--suite",
                      "no suite named \"" + suite_filter + "\" (available: " + names + ")");
  }
  bool all_passed = true;
  for (const checks::CheckResult& res : results) {
    all_passed = all_passed && res.passed;
    out << (res.passed ? "PASS" : "FAIL") << " " << res.suite << " (" << res.assertions
        << " checks)";
    if (!res.detail.empty()) out << ": " << res.detail;
    out << "\n";
  }
  if (options.inject != checks::FaultInjection::none)
    out << "fault injection active: " << checks::injection_name(options.inject) << "\n";
  out << (all_passed ? "all suites passed" : "SUITE FAILURES PRESENT") << "\n";
  return all_passed ? kExitSuccess : kExitFailure;
}

}  // namespace rmt::cli
