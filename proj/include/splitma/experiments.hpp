#pragma once

// Named experiments A1..A12. Each one builds its fixture, runs the solvers and
// compares the measured quantities with fixed tolerances.

#include <string>
#include <vector>

namespace splitma {

struct Measurement {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
  bool timing = false;  // wall-clock measurement; varies between runs
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  std::vector<Measurement> measurements;
  std::string error;  // non-empty when the run threw
};

const std::vector<std::string>& criterion_ids();
bool is_criterion(const std::string& id);

/// Throws InvalidArgument for an unknown id; solver exceptions are caught and
/// reported as a failed criterion.
CriterionResult run_criterion(const std::string& id);

/// One line: id, PASS/FAIL, title, then name=value(<bound) for each measurement.
std::string summary_line(const CriterionResult& result);

}  // namespace splitma
