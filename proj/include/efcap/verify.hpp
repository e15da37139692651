// The acceptance suite: fourteen numbered checks with measured values and
// tolerances, grouped into named suites.
#ifndef EFCAP_VERIFY_HPP
#define EFCAP_VERIFY_HPP

#include <string>
#include <string_view>
#include <vector>

#include "efcap/integrate.hpp"

namespace efcap {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string measured;
  std::string tolerance;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 14;

/// all, critical-n3, exponents, supercritical-n3, bounds, limits.
std::vector<std::string> suite_names();
/// Criterion ids of a suite; throws InvalidArgument for unknown names.
std::vector<int> suite_criteria(std::string_view suite);

/// Runs one criterion. Library errors are reported as a failure, not thrown.
CriterionResult run_criterion(int id, const IntegratorConfig& cfg = {});
std::vector<CriterionResult> run_suite(std::string_view suite, const IntegratorConfig& cfg = {});

/// "criterion  6 PASS  title  measured ... | tolerance ... | 1.2 s"
std::string format_result(const CriterionResult& r);

}  // namespace efcap

#endif  // EFCAP_VERIFY_HPP
