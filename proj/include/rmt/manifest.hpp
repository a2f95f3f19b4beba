#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace rmt::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance record written next to every output table.  The embedded
/// canonical config plus the seed reproduce the run exactly; the effective
/// thread count is deliberately absent because it cannot change any result.
/// The timestamp honors SOURCE_DATE_EPOCH so archived runs can be compared
/// byte for byte.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string config_hash;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::vector<std::string> output_paths;
  nlohmann::json config;
  long n = 0;
  long trials_requested = 0;
  long trials_kept = 0;
  int failed_trials = 0;
  int dense_fallbacks = 0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string iso_timestamp_now();

void write_manifest(const std::string& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::string& dir);

}  // namespace rmt::cli
