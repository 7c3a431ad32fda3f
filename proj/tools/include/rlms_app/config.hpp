#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <rlms/experiment.hpp>

namespace rlms::app {

/// Malformed, unknown or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::vector<std::string> filters;
    double factor_min = 0.1;
    double factor_max = 10.0;
    std::size_t points = 21;
    std::size_t probe_iteration = 0;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ScenarioConfig {
    Scenario scenario;
    std::string description;
    std::optional<SweepSpec> sweep;
};

/// Parses a JSON scenario document. Rejects unknown keys, wrong types and
/// scenarios that fail validation; the message names the offending key path.
ScenarioConfig parse_config(std::string_view text);

/// Canonical JSON form. Every default is written out, so the document is
/// self-contained: parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& config);

/// Applies `path=value` to a JSON document before parsing. The path is dotted;
/// array elements are addressed by index ("filters.1.eta.value"). The value is
/// read as JSON when possible and as a string otherwise.
std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides);

/// Resolves a built-in name or a file path to document text.
std::string load_source(const std::string& name_or_path);

/// load_source, overrides, optional seed replacement, parse.
ScenarioConfig load_config(const std::string& name_or_path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed = std::nullopt);

} // namespace rlms::app
