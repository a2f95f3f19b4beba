#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "rmt/montecarlo.hpp"

namespace rmt::cli {

/// Schema violation carrying the dotted path of the offending field.
struct ConfigError : std::runtime_error {
  std::string field;

  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path.empty() ? message
                                              : field_path + ": " + message),
        field(std::move(field_path)) {}
};

/// Command-line overrides folded into the parsed configuration.  The seed
/// changes the results and is therefore recorded in the canonical config;
/// the thread count is execution-only and never recorded.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct LoadedConfig {
  ExperimentConfig experiment;
  nlohmann::json canonical;  // parsed config with the effective seed
  std::string hash;          // 16 hex digits
};

/// FNV-1a digest of the canonical dump.  nlohmann::json stores object keys
/// sorted, so the hash is invariant under key reordering of the source file.
std::string config_hash(const nlohmann::json& config);

/// Parses and validates a configuration document (sections ensemble,
/// deformation, control, montecarlo).  Unknown fields, missing required
/// fields and out-of-domain values raise ConfigError with the field path.
LoadedConfig parse_config(const nlohmann::json& raw, const CliOverrides& overrides = {});

/// Reads a JSON file and parses it; file and syntax problems are reported as
/// ConfigError too.
LoadedConfig load_config(const std::string& path, const CliOverrides& overrides = {});

}  // namespace rmt::cli
