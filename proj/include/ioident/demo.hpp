#pragma once

#include <set>
#include <string>
#include <vector>

#include "ioident/csv.hpp"

namespace ioident::demo {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct BatteryReport {
    std::vector<CheckResult> checks;
    std::set<std::string> exercised_ops;
    bool all_passed() const;
};

/// The verification battery behind the `demo paper` CLI command, doubling as
/// the integration acceptance suite: transient distinction, the scalar
/// equivalence law, derivative-based estimators, step invisibility and its
/// Cramer-Rao consequences, gray-box intervals, the Bayesian grid,
/// quasi-steady-state reduction, deconvolution, and numerical hygiene.
/// Exercises every public operation; exercised_ops records which.
BatteryReport run_battery();

std::string format_battery_report(const BatteryReport& report);

} // namespace ioident::demo
