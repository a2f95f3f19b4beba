#include "rmt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <utility>
#include <vector>

#include "rmt/rng.hpp"

namespace rmt::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError(prefix + item.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& prefix, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(prefix + key, "missing required field");
  return obj.at(key);
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path, "expected a number");
  return node.get<double>();
}

long as_integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
  return node.get<long>();
}

std::uint64_t as_u64(const json& node, const std::string& path) {
  if (!(node.is_number_integer() || node.is_number_unsigned()) ||
      (node.is_number_integer() && node.get<long long>() < 0))
    throw ConfigError(path, "expected a non-negative integer");
  return node.get<std::uint64_t>();
}

bool as_bool(const json& node, const std::string& path) {
  if (!node.is_boolean()) throw ConfigError(path, "expected a boolean");
  return node.get<bool>();
}

std::string as_string(const json& node, const std::string& path) {
  if (!node.is_string()) throw ConfigError(path, "expected a string");
  return node.get<std::string>();
}

std::vector<double> as_number_array(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) throw ConfigError(path, "expected a nonempty array");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(as_number(node.at(i), path + "[" + std::to_string(i) + "]"));
  return out;
}

SymmetryClass parse_symmetry(const json& ensemble) {
  const std::string name = as_string(require(ensemble, "ensemble.", "symmetry"),
                                     "ensemble.symmetry");
  if (name == "real_symmetric") return SymmetryClass::real_symmetric;
  if (name == "complex_hermitian") return SymmetryClass::complex_hermitian;
  throw ConfigError("ensemble.symmetry",
                    "expected \"real_symmetric\" or \"complex_hermitian\", got \"" + name +
                        "\"");
}

EntryDistribution parse_law(const json& ensemble) {
  const std::string name =
      as_string(require(ensemble, "ensemble.", "law"), "ensemble.law");
  if (name == "gaussian") {
    reject_unknown(ensemble, "ensemble.", {"symmetry", "law"});
    return EntryDistribution::gaussian();
  }
  if (name == "rademacher") {
    reject_unknown(ensemble, "ensemble.", {"symmetry", "law"});
    return EntryDistribution::rademacher();
  }
  if (name == "shifted_exponential") {
    reject_unknown(ensemble, "ensemble.", {"symmetry", "law"});
    return EntryDistribution::shifted_exponential();
  }
  if (name == "skewed_two_point") {
    reject_unknown(ensemble, "ensemble.", {"symmetry", "law", "third_moment"});
    const double m3 = as_number(require(ensemble, "ensemble.", "third_moment"),
                                "ensemble.third_moment");
    return EntryDistribution::skewed_two_point(m3);
  }
  if (name == "custom_table") {
    reject_unknown(ensemble, "ensemble.", {"symmetry", "law", "values", "probabilities"});
    const std::vector<double> values =
        as_number_array(require(ensemble, "ensemble.", "values"), "ensemble.values");
    const std::vector<double> probs = as_number_array(
        require(ensemble, "ensemble.", "probabilities"), "ensemble.probabilities");
    try {
      return EntryDistribution::custom_table(values, probs);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("ensemble", e.what());
    }
  }
  throw ConfigError("ensemble.law", "unknown law \"" + name + "\"");
}

ComplexMatrix parse_v(const json& deformation, Index n, Index r, SymmetryClass sym,
                      std::uint64_t seed) {
  const json& v = require(deformation, "deformation.", "v");
  if (!v.is_object()) throw ConfigError("deformation.v", "expected an object");
  const std::string kind = as_string(require(v, "deformation.v.", "kind"),
                                     "deformation.v.kind");
  if (kind == "standard_basis") {
    reject_unknown(v, "deformation.v.", {"kind", "columns"});
    std::vector<Index> cols(r);
    if (v.contains("columns")) {
      const json& jc = v.at("columns");
      if (!jc.is_array() || static_cast<Index>(jc.size()) != r)
        throw ConfigError("deformation.v.columns", "expected an array of length " +
                                                       std::to_string(r));
      std::set<long> seen;
      for (Index i = 0; i < r; ++i) {
        const long c = as_integer(jc.at(i), "deformation.v.columns[" + std::to_string(i) + "]");
        if (c < 1 || c > n)
          throw ConfigError("deformation.v.columns[" + std::to_string(i) + "]",
                            "must lie in [1, " + std::to_string(n) + "]");
        if (!seen.insert(c).second)
          throw ConfigError("deformation.v.columns", "positions must be distinct");
        cols[i] = c - 1;
      }
    } else {
      for (Index i = 0; i < r; ++i) cols[i] = i;
    }
    ComplexMatrix m = ComplexMatrix::Zero(n, r);
    for (Index i = 0; i < r; ++i) m(cols[i], i) = 1.0;
    return m;
  }
  if (kind == "uniform") {
    reject_unknown(v, "deformation.v.", {"kind"});
    if (r != 1)
      throw ConfigError("deformation.v.kind",
                        "uniform direction requires rank 1, got rank " + std::to_string(r));
    return ComplexMatrix::Constant(n, 1,
                                   Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  }
  if (kind == "random_orthonormal") {
    reject_unknown(v, "deformation.v.", {"kind"});
    RandomStream rng = RandomStream::derive(seed, 0, stream_purpose::deformation_setup);
    const bool real = sym == SymmetryClass::real_symmetric;
    ComplexMatrix g(n, r);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < r; ++j)
        g(i, j) = real ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    return qr.householderQ() * ComplexMatrix::Identity(n, r);
  }
  if (kind == "explicit") {
    reject_unknown(v, "deformation.v.", {"kind", "real", "imag"});
    const json& jr = require(v, "deformation.v.", "real");
    if (!jr.is_array() || static_cast<Index>(jr.size()) != n)
      throw ConfigError("deformation.v.real", "expected " + std::to_string(n) + " rows");
    const bool has_imag = v.contains("imag");
    if (has_imag && sym == SymmetryClass::real_symmetric)
      throw ConfigError("deformation.v.imag",
                        "imaginary parts are invalid in the real symmetric class");
    ComplexMatrix m(n, r);
    for (Index i = 0; i < n; ++i) {
      const std::string row_path = "deformation.v.real[" + std::to_string(i) + "]";
      const json& row = jr.at(i);
      if (!row.is_array() || static_cast<Index>(row.size()) != r)
        throw ConfigError(row_path, "expected " + std::to_string(r) + " columns");
      for (Index j = 0; j < r; ++j)
        m(i, j) = Complex(as_number(row.at(j), row_path + "[" + std::to_string(j) + "]"), 0.0);
    }
    if (has_imag) {
      const json& ji = v.at("imag");
      if (!ji.is_array() || static_cast<Index>(ji.size()) != n)
        throw ConfigError("deformation.v.imag", "expected " + std::to_string(n) + " rows");
      for (Index i = 0; i < n; ++i) {
        const std::string row_path = "deformation.v.imag[" + std::to_string(i) + "]";
        const json& row = ji.at(i);
        if (!row.is_array() || static_cast<Index>(row.size()) != r)
          throw ConfigError(row_path, "expected " + std::to_string(r) + " columns");
        for (Index j = 0; j < r; ++j)
          m(i, j) += Complex(0.0, as_number(row.at(j), row_path + "[" + std::to_string(j) + "]"));
      }
    }
    return m;
  }
  throw ConfigError("deformation.v.kind", "unknown kind \"" + kind + "\"");
}

}  // namespace

std::string config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedConfig parse_config(const nlohmann::json& raw, const CliOverrides& overrides) {
  if (!raw.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(raw, "", {"ensemble", "deformation", "control", "montecarlo"});

  const json& ensemble = require(raw, "", "ensemble");
  const json& deformation = require(raw, "", "deformation");
  const json& montecarlo = require(raw, "", "montecarlo");
  if (!ensemble.is_object()) throw ConfigError("ensemble", "expected an object");
  if (!deformation.is_object()) throw ConfigError("deformation", "expected an object");
  if (!montecarlo.is_object()) throw ConfigError("montecarlo", "expected an object");

  const SymmetryClass sym = parse_symmetry(ensemble);
  const EntryDistribution law = parse_law(ensemble);

  reject_unknown(montecarlo, "montecarlo.", {"n", "trials", "seed", "solver", "threads"});
  const long n = as_integer(require(montecarlo, "montecarlo.", "n"), "montecarlo.n");
  if (n < 3) throw ConfigError("montecarlo.n", "must be at least 3");
  const long trials =
      as_integer(require(montecarlo, "montecarlo.", "trials"), "montecarlo.trials");
  if (trials < 1) throw ConfigError("montecarlo.trials", "must be at least 1");
  std::uint64_t seed = as_u64(require(montecarlo, "montecarlo.", "seed"), "montecarlo.seed");
  if (overrides.seed) seed = *overrides.seed;

  ExperimentConfig::Solver solver = ExperimentConfig::Solver::automatic;
  if (montecarlo.contains("solver")) {
    const std::string name = as_string(montecarlo.at("solver"), "montecarlo.solver");
    if (name == "auto")
      solver = ExperimentConfig::Solver::automatic;
    else if (name == "full")
      solver = ExperimentConfig::Solver::full;
    else if (name == "extreme")
      solver = ExperimentConfig::Solver::extreme;
    else
      throw ConfigError("montecarlo.solver",
                        "expected \"auto\", \"full\" or \"extreme\", got \"" + name + "\"");
  }
  int threads = 0;
  if (montecarlo.contains("threads")) {
    const long t = as_integer(montecarlo.at("threads"), "montecarlo.threads");
    if (t < 0) throw ConfigError("montecarlo.threads", "must be non-negative");
    threads = static_cast<int>(t);
  }
  if (overrides.threads) {
    if (*overrides.threads < 0) throw ConfigError("--threads", "must be non-negative");
    threads = *overrides.threads;
  }

  ControlParams cp;
  cp.n = n;
  double delta_cutoff = 0.0;
  bool include_e_term = true;
  if (raw.contains("control")) {
    const json& control = raw.at("control");
    if (!control.is_object()) throw ConfigError("control", "expected an object");
    reject_unknown(control, "control.",
                   {"s_cutoff", "k_exponent", "outlier_factor", "literal_phi_threshold",
                    "delta_cutoff", "include_e_term"});
    if (control.contains("s_cutoff")) {
      cp.s_cutoff = as_number(control.at("s_cutoff"), "control.s_cutoff");
      if (cp.s_cutoff <= 0.0) throw ConfigError("control.s_cutoff", "must be positive");
    }
    if (control.contains("k_exponent")) {
      cp.k_exponent = as_number(control.at("k_exponent"), "control.k_exponent");
      if (cp.k_exponent <= 0.0) throw ConfigError("control.k_exponent", "must be positive");
    }
    if (control.contains("outlier_factor")) {
      cp.outlier_factor = as_number(control.at("outlier_factor"), "control.outlier_factor");
      if (cp.outlier_factor <= 0.0)
        throw ConfigError("control.outlier_factor", "must be positive");
    }
    if (control.contains("literal_phi_threshold"))
      cp.literal_phi_threshold =
          as_bool(control.at("literal_phi_threshold"), "control.literal_phi_threshold");
    if (control.contains("delta_cutoff")) {
      delta_cutoff = as_number(control.at("delta_cutoff"), "control.delta_cutoff");
      if (delta_cutoff < 0.0 || delta_cutoff >= 1.0)
        throw ConfigError("control.delta_cutoff", "must lie in [0, 1)");
    }
    if (control.contains("include_e_term"))
      include_e_term = as_bool(control.at("include_e_term"), "control.include_e_term");
  }

  reject_unknown(deformation, "deformation.", {"d", "v", "sigma"});
  const std::vector<double> d_values =
      as_number_array(require(deformation, "deformation.", "d"), "deformation.d");
  const Index r = static_cast<Index>(d_values.size());
  RealVector d(r);
  for (Index i = 0; i < r; ++i) d[i] = d_values[i];
  double sigma = 0.0;
  if (deformation.contains("sigma")) {
    sigma = as_number(deformation.at("sigma"), "deformation.sigma");
    if (sigma <= 1.0) throw ConfigError("deformation.sigma", "must exceed 1");
  }
  const ComplexMatrix v = parse_v(deformation, n, r, sym, seed);

  LoadedConfig loaded{
      ExperimentConfig{
          .n = n,
          .trials = static_cast<int>(trials),
          .master_seed = seed,
          .deformation = [&] {
            try {
              return Deformation(v, d, sigma);
            } catch (const std::invalid_argument& e) {
              throw ConfigError("deformation", e.what());
            }
          }(),
          .law = law,
          .sym = sym,
          .cp = cp,
          .delta_cutoff = delta_cutoff,
          .include_e_term = include_e_term,
          .solver = solver,
          .threads = threads,
      },
      raw, ""};
  try {
    loaded.experiment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  loaded.canonical["montecarlo"]["seed"] = seed;
  loaded.hash = config_hash(loaded.canonical);
  return loaded;
}

LoadedConfig load_config(const std::string& path, const CliOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file: " + path);
  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(raw, overrides);
}

}  // namespace rmt::cli
