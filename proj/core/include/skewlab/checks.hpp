#pragma once

#include "skewlab/experiment_config.hpp"

#include <string>
#include <vector>

namespace skewlab {

/// Discretisation allowance added to the Monte Carlo error in the duality check.
inline constexpr double kDualityPdeBudget = 0.02;

/// Outcome of one check. A check passes iff deviation < tolerance, where
/// deviation is kind-specific:
///   splitting-probability  |observed - alpha| / binomial stderr
///   jump-ratio             |estimated / predicted - 1|
///   occupation-ratio       |raw window ratio / predicted - 1| at the narrowest epsilon
///   duality                |pde - mc| / (mc stderr + budget / 3)
///   conservation           relative mass drift
///   continuity-probe       max |right - left| / paired stderr over probes
struct CheckResult {
    std::string name;
    CheckKind kind = CheckKind::splitting_probability;
    double predicted = 0.0;
    double observed = 0.0;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct CheckReport {
    std::string plan_name;
    std::string output_dir;
    std::vector<CheckResult> results;  // sorted by name

    [[nodiscard]] bool all_passed() const noexcept;
};

/// Runs every check of the plan and writes
///   <out_root>/<plan name>/{ensemble.csv, localtime.csv, ratio.csv, pde.csv, report.csv}.
/// Files that no check feeds are written with their header only. Errors from the
/// engine or solver are rethrown with the failing check named.
[[nodiscard]] CheckReport run_checks(const MediumSpec& spec, const ExperimentPlan& plan, const std::string& out_root);

/// f(y) = exp(-y^2), the duality test function.
[[nodiscard]] double duality_test_function(double y) noexcept;

}  // namespace skewlab
