#pragma once

#include <ostream>
#include <string>

#include "rmt/config.hpp"

namespace rmt::cli {

/// Exit codes shared by every subcommand: 0 success, 1 failed checks or a
/// failed run, 2 usage or configuration errors.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides, std::ostream& out);

int cmd_reference(const std::string& config_path, const std::string& out_dir,
                  const CliOverrides& overrides, std::ostream& out);

int cmd_compare(const std::string& sim_dir, const std::string& ref_dir,
                const std::string& out_dir, std::ostream& out);

int cmd_check(const std::string& suite_filter, const std::string& inject,
              std::ostream& out);

}  // namespace rmt::cli
