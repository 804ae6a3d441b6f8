#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace ptl {

/// Outcome of evaluating one inequality instance lhs <= rhs.
/// verdict is always (slack >= -tolerance) with slack = rhs - lhs.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool verdict = true;
  std::map<std::string, double> constants;

  static InequalityReport make(std::string name, double lhs, double rhs, double tolerance,
                               std::map<std::string, double> constants = {}) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.tolerance = tolerance;
    r.verdict = r.slack >= -tolerance;
    r.constants = std::move(constants);
    return r;
  }
};

/// Verdict tolerance for norm inequalities: 1e-8 * (1 + |rhs|).
inline double inequality_tolerance(double rhs) { return 1e-8 * (1.0 + std::abs(rhs)); }

}  // namespace ptl
