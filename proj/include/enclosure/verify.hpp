#pragma once

// Cross-validation suite: every analytic route in the library is checked
// against an independent oracle (1-D quadrature, Monte Carlo, finite
// differences, brute-force surface search, or a mesh-refinement ladder).
// Each criterion is self-contained so it can run as its own test process.

#include <string>
#include <vector>

namespace enclosure {

struct CriterionResult {
  int index = 0;            // 1-based criterion number
  std::string name;         // short kebab-case label
  bool pass = false;
  std::string detail;       // one-line human-readable outcome
  std::string data_json;    // machine-readable measurements (JSON object)
};

// Number of criteria in the suite.
int criterion_count();

// Short name of criterion `index` (1-based).
const char* criterion_name(int index);

// Run one criterion.  `work_dir` holds cached wave traces so expensive
// simulations are shared across criteria and repeat runs.
CriterionResult run_criterion(int index, const std::string& work_dir);

// Aggregate report (sorted keys, deterministic) for a set of results.
std::string verify_report_json(const std::vector<CriterionResult>& results);

}  // namespace enclosure
