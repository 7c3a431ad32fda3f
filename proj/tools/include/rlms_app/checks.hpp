#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rlms_app/config.hpp"
#include "rlms_app/report.hpp"

namespace rlms::app {

struct Assertion {
    std::string description;
    double measured = 0.0;
    std::string threshold;
    bool passed = false;
};

/// True if assertions are registered for the built-in `name`.
bool has_checks(std::string_view name);

/// Evaluates the assertions registered for `name` against a finished run.
/// Throws std::invalid_argument if the name has none or the run lacks a
/// filter they refer to.
std::vector<Assertion> evaluate_checks(std::string_view name, const ScenarioConfig& config,
                                       const RunArtifacts& artifacts);

/// `[PASS] description: measured=... threshold ...`
std::string format_assertion(const Assertion& a);

} // namespace rlms::app
