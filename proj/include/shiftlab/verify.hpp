#pragma once

#include <string>
#include <vector>

namespace shiftlab {

// One self-contained correctness check with pinned tolerances. `detail`
// carries the measured numbers (or the failure reason), so a report line is
// meaningful on its own.
struct CheckResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Registered check ids, in report order.
std::vector<std::string> all_check_ids();

// Run one check by id; unknown ids throw DomainError. Exceptions inside a
// check are caught and reported as failures, never propagated.
CheckResult run_check(const std::string& id);

// Run every registered check in order.
std::vector<CheckResult> run_all_checks();

}  // namespace shiftlab
