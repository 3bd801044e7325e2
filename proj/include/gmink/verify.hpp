#pragma once

#include <string>
#include <vector>

#include "gmink/config.hpp"

namespace gmink {

enum class CheckOutcome { Pass, Fail, Skip };
const char* to_string(CheckOutcome outcome);

struct CheckResult {
  std::string name;
  CheckOutcome outcome = CheckOutcome::Skip;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", ">=", ">" or "in [a,b]"
  std::string detail;
};

struct VerifyReport {
  int dim = 2;
  int resolution = 0;
  std::string measure;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;

  bool passed() const;
  std::size_t failures() const;
};

// Runs the invariant suite for the configured measure: ball closed forms,
// the isoperimetric instance, oracle agreements, flow conservation and
// monotonicity, the Newton solve with its uniqueness probe, and chart
// residuals. Solver failures become failed checks, never exceptions.
VerifyReport run_verify(const RunConfig& cfg);

std::string verify_json(const VerifyReport& report);
// name,outcome,value,comparison,threshold,detail
std::string verify_csv(const VerifyReport& report);

}  // namespace gmink
