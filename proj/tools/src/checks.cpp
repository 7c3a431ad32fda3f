#include "rlms_app/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rlms::app {
namespace {

constexpr double kDominanceZ = 3.0;
constexpr double kDominanceFraction = 0.99;

double steady_db(const RunArtifacts& a, const std::string& filter)
{
    return to_db(find_trace(a.traces, filter).steady_state());
}

Assertion at_least(std::string description, double measured, double bound)
{
    return {std::move(description), measured, ">= " + format_number(bound), measured >= bound};
}

Assertion greater_than(std::string description, double measured, double bound)
{
    return {std::move(description), measured, "> " + format_number(bound), measured > bound};
}

Assertion within(std::string description, double measured, double lo, double hi)
{
    return {std::move(description), measured, "in [" + format_number(lo) + ", " + format_number(hi) + "]",
            measured >= lo && measured <= hi};
}

/// dB by which `better` lies below `worse` in steady state.
double gap_db(const RunArtifacts& a, const std::string& better, const std::string& worse)
{
    return steady_db(a, worse) - steady_db(a, better);
}

Assertion dominance(const RunArtifacts& a, const std::string& reg, const std::string& conv)
{
    const auto report = dominance_check(find_trace(a.traces, reg), find_trace(a.traces, conv), kDominanceZ);
    return at_least("fraction of iterations where " + reg + " MSD <= " + conv + " MSD + 3 paired stderr",
                    report.pass_fraction, kDominanceFraction);
}

std::size_t event_iteration(const ScenarioConfig& c, std::size_t index)
{
    const auto& events = c.scenario.system.events;
    if (index >= events.size()) {
        throw std::invalid_argument("scenario lacks tracking event " + std::to_string(index));
    }
    return events[index].iteration;
}

/// Mean MSD in dB over the `length` iterations starting at an event.
double post_event_db(const RunArtifacts& a, const std::string& filter, std::size_t event, std::size_t length)
{
    const auto& t = find_trace(a.traces, filter);
    return to_db(t.window_mean(event, std::min(event + length, t.mean.size())));
}

std::vector<Assertion> fig4(const ScenarioConfig&, const RunArtifacts& a)
{
    return {
        greater_than("steady-state dB gain of RZA-NLMS over NLMS", gap_db(a, "RZA-NLMS", "NLMS"), 0.0),
        at_least("steady-state dB gain of ZA-NLMS over NLMS", gap_db(a, "ZA-NLMS", "NLMS"), 1.0),
        at_least("steady-state dB gain of RZA-NLMS over ZA-NLMS", gap_db(a, "RZA-NLMS", "ZA-NLMS"), 1.0),
        dominance(a, "ZA-NLMS", "NLMS"),
    };
}

std::vector<Assertion> fig5(const ScenarioConfig&, const RunArtifacts& a)
{
    if (!a.sweep) {
        throw std::invalid_argument("scenario has no eta sweep");
    }
    const auto index = [&](const std::string& name) {
        for (std::size_t i = 0; i < a.sweep->filters.size(); ++i) {
            if (a.sweep->filters[i] == name) {
                return i;
            }
        }
        throw std::invalid_argument("sweep lacks filter '" + name + "'");
    };
    const double za = a.sweep->spread_db(index("ZA-NLMS"));
    const double rza = a.sweep->spread_db(index("RZA-NLMS"));
    return {
        Assertion{"probe MSD spread (dB) of RZA-NLMS over the eta sweep", rza,
                  "< " + format_number(za) + " (ZA-NLMS spread)", rza < za},
    };
}

std::vector<Assertion> fig7(const ScenarioConfig&, const RunArtifacts& a)
{
    return {
        greater_than("steady-state dB gain of RZA-NLMS-white-rho over NLMS", gap_db(a, "RZA-NLMS-white-rho", "NLMS"),
                     0.0),
        at_least("steady-state dB gain of RZA-NLMS-wss-rho over NLMS", gap_db(a, "RZA-NLMS-wss-rho", "NLMS"), 0.0),
        greater_than("steady-state dB gain of RZA-NLMS-white-rho over RZA-NLMS-wss-rho",
                     gap_db(a, "RZA-NLMS-white-rho", "RZA-NLMS-wss-rho"), 0.0),
        dominance(a, "RZA-NLMS-wss-rho", "NLMS"),
    };
}

constexpr std::size_t kReferenceWindow = 100;
constexpr double kReconvergenceDb = 2.0;

std::vector<Assertion> fig9(const ScenarioConfig& c, const RunArtifacts& a)
{
    const std::size_t event = event_iteration(c, 0);
    const auto time = [&](const std::string& filter) {
        const auto t = reconvergence_time(find_trace(a.traces, filter), event, kReferenceWindow, kReconvergenceDb);
        return t ? static_cast<double>(*t) : INFINITY;
    };
    const double rza = time("RZA-NLMS");
    const double nlms = time("NLMS");
    return {
        Assertion{"iterations for RZA-NLMS to return within 2 dB of its pre-event MSD", rza,
                  "< " + format_number(nlms) + " (NLMS)", rza < nlms},
    };
}

std::vector<Assertion> fig11(const ScenarioConfig&, const RunArtifacts& a)
{
    return {
        within("steady-state dB gain of GRZA-NLMS over NLMS", gap_db(a, "GRZA-NLMS", "NLMS"), 7.0, 13.0),
        within("steady-state dB gain of RZA-NLMS over NLMS", gap_db(a, "RZA-NLMS", "NLMS"), 7.0, 13.0),
    };
}

std::vector<Assertion> fig12(const ScenarioConfig&, const RunArtifacts& a)
{
    return {
        at_least("steady-state dB gain of GRZA-NLMS over RZA-NLMS", gap_db(a, "GRZA-NLMS", "RZA-NLMS"), 2.0),
        at_least("steady-state dB gain of RZA-NLMS over NLMS", gap_db(a, "RZA-NLMS", "NLMS"), 0.0),
    };
}

constexpr std::size_t kTrackingWindow = 1000;

std::vector<Assertion> fig13(const ScenarioConfig& c, const RunArtifacts& a)
{
    const std::size_t shift = event_iteration(c, 0);
    const std::size_t reset = event_iteration(c, 1);
    const auto after = [&](const std::string& f, std::size_t e) { return post_event_db(a, f, e, kTrackingWindow); };
    return {
        greater_than("dB gain of GRZA-NLMS over NLMS in the 1000 iterations after the shift",
                     after("NLMS", shift) - after("GRZA-NLMS", shift), 0.0),
        greater_than("dB gain of RZA-NLMS over NLMS in the 1000 iterations after the shift",
                     after("NLMS", shift) - after("RZA-NLMS", shift), 0.0),
        greater_than("dB gain of GRZA-NLMS over RZA-NLMS in the 1000 iterations after the reset",
                     after("RZA-NLMS", reset) - after("GRZA-NLMS", reset), 0.0),
    };
}

using CheckFn = std::vector<Assertion> (*)(const ScenarioConfig&, const RunArtifacts&);

const std::pair<std::string_view, CheckFn> kChecks[] = {
    {"fig4-white-sparse", fig4},      {"fig5-eta-sensitivity", fig5}, {"fig7-correlated-sparse", fig7},
    {"fig9-tracking", fig9},          {"fig11-group-white", fig11},   {"fig12-group-correlated", fig12},
    {"fig13-group-tracking", fig13},
};

CheckFn lookup(std::string_view name)
{
    for (const auto& [n, fn] : kChecks) {
        if (n == name) {
            return fn;
        }
    }
    return nullptr;
}

} // namespace

bool has_checks(std::string_view name) { return lookup(name) != nullptr; }

std::vector<Assertion> evaluate_checks(std::string_view name, const ScenarioConfig& config,
                                       const RunArtifacts& artifacts)
{
    const CheckFn fn = lookup(name);
    if (fn == nullptr) {
        throw std::invalid_argument("no checks registered for '" + std::string(name) + "'");
    }
    return fn(config, artifacts);
}

std::string format_assertion(const Assertion& a)
{
    return std::string(a.passed ? "[PASS] " : "[FAIL] ") + a.description + ": measured=" + format_number(a.measured)
         + ", threshold " + a.threshold;
}

} // namespace rlms::app
