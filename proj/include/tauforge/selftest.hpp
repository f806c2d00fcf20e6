#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tauforge {

struct CheckResult {
  std::string module;
  std::string name;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // bound it is compared against
  std::string relation;    // "<=" or ">="
  bool passed = false;
  std::string detail;      // exception text or extra numbers
};

struct SelftestReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool passed() const;
};

// Fast property suite over every module. Progress lines go to `log` when set.
SelftestReport run_selftest(int threads = 1, std::ostream* log = nullptr);

}  // namespace tauforge
