#pragma once

#include <string>
#include <vector>

namespace aflx {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

// The release gates: every check must pass for the build to be considered
// good. Each entry prints as one line; details carry the measured values.
std::vector<CheckResult> acceptance_checks();

// Fast structural property sweeps (seeded); a subset of what the unit tests
// cover, suitable for a quick health check from the command line.
std::vector<CheckResult> invariant_checks();

}  // namespace aflx
