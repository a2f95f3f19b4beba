#include "rmt/manifest.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "rmt/config.hpp"

namespace rmt::cli {

std::string iso_timestamp_now() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  else
    t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["timestamp"] = timestamp;
  j["seed"] = seed;
  j["output_paths"] = output_paths;
  j["config"] = config;
  j["n"] = n;
  j["trials_requested"] = trials_requested;
  j["trials_kept"] = trials_kept;
  j["failed_trials"] = failed_trials;
  j["dense_fallbacks"] = dense_fallbacks;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command = j.at("command").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.output_paths = j.at("output_paths").get<std::vector<std::string>>();
  m.config = j.at("config");
  m.n = j.at("n").get<long>();
  m.trials_requested = j.at("trials_requested").get<long>();
  m.trials_kept = j.at("trials_kept").get<long>();
  m.failed_trials = j.at("failed_trials").get<int>();
  m.dense_fallbacks = j.at("dense_fallbacks").get<int>();
  return m;
}

void write_manifest(const std::string& dir, const RunManifest& manifest) {
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << manifest.to_json().dump(2) << "\n";
}

RunManifest read_manifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw ConfigError("", "missing manifest.json in " + dir);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("manifest.json is not valid JSON: ") + e.what());
  }
  try {
    return RunManifest::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", std::string("manifest.json is incomplete: ") + e.what());
  }
}

}  // namespace rmt::cli
