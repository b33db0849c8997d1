#pragma once
// End-to-end checks of the solver against analytic limits and the Fock oracle.

#include <iosfwd>
#include <string>
#include <vector>

namespace rabi::acceptance {

enum class Suite { Quick, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Runs one criterion (1..11). Time over budget counts as a failure.
CriterionResult run_criterion(int id);

/// Quick skips the figure reproductions (criteria 4 and 8).
std::vector<CriterionResult> run_suite(Suite suite);

/// One "PASS|FAIL [id] name (t s): detail" line per result.
void print_report(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace rabi::acceptance
