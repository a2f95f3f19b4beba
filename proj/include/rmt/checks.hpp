#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rmt::checks {

// Deliberate faults that can be injected at the suite boundary to confirm
// the checks actually detect broken invariants. The library itself is never
// modified; each fault wraps one call site inside the affected suite.
enum class FaultInjection {
  none,
  flip_p_sign,  // negates the rank-one pairing tensor inside "tensors"
  drop_e_term,  // assembles fluctuation covariances without the floor term
                // inside "psd"
  break_sort,   // reverses sorted eigenvalue output inside "sort"
};

FaultInjection parse_injection(const std::string& name);
std::string injection_name(FaultInjection inject);

struct CheckOptions {
  std::string suite_filter;  // empty runs every suite, otherwise exact name
  FaultInjection inject = FaultInjection::none;
  std::uint64_t seed = 0x434845434B53ULL;
};

struct CheckResult {
  std::string suite;
  bool passed = false;
  int assertions = 0;
  std::string detail;  // empty on success, first failures otherwise
};

std::vector<std::string> suite_names();

// Runs the requested suites and reports one result per suite. Unknown
// suite_filter values produce an empty vector.
std::vector<CheckResult> run_check_suites(const CheckOptions& options);

}  // namespace rmt::checks
