#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mmse/quadrature.hpp"

namespace mmse {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

// Deliberate faults for exercising the battery itself.
enum class Fault {
  CorruptSignedCount,  // perturb one e_lambda in the closed-form derivative
  SkewQuadrature,      // scale one Gauss-Hermite weight
};

struct BatteryOptions {
  QuadConfig cfg;
  std::set<Fault> faults;
  std::function<void(const CheckResult&)> on_result;  // progress hook
};

Fault parse_fault(std::string_view name);

// Every module's invariant list, run against the built-in distribution
// families. Exceptions inside a check count as a failure of that check.
std::vector<CheckResult> run_battery(const BatteryOptions& opts);

}  // namespace mmse
