#pragma once

#include <span>
#include <string_view>

namespace rlms::app {

struct BuiltinScenario {
    std::string_view name;
    std::string_view document;
};

/// Scenario documents compiled in from tools/scenarios, in catalog order.
std::span<const BuiltinScenario> builtin_scenarios();

const BuiltinScenario* find_builtin(std::string_view name);

} // namespace rlms::app
