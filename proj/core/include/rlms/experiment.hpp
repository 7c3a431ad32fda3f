#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rlms/adaptive_filter.hpp"
#include "rlms/signals.hpp"

namespace rlms {

/// How a filter's eta is obtained for a trial.
///  - Fixed: `value`.
///  - TrueValue: the penalty evaluated at the realised true system with unit
///    weights for unweighted kinds (||w||_1 or ||w||_{1,2}); for weighted kinds
///    the number of non-zero coefficients or groups.
/// The result is multiplied by `factor`.
struct EtaSpec {
    enum class Mode { Fixed, TrueValue };
    Mode mode = Mode::Fixed;
    double value = 0.0;
    double factor = 1.0;

    double resolve(const std::optional<Penalty>& penalty, std::span<const double> w_true) const;

    friend bool operator==(const EtaSpec&, const EtaSpec&) = default;
};

struct FilterSpec {
    std::string name;
    StepSizePolicy step = Normalized{1.0};
    std::optional<Penalty> penalty;
    RhoPolicy rho;
    EtaSpec eta;
};

struct GeneralSparseSpec {
    std::size_t k;
};
struct GroupSparseSpec {
    std::vector<Block> blocks;
};

struct SystemSpec {
    std::variant<GeneralSparseSpec, GroupSparseSpec> kind = GeneralSparseSpec{0};
    std::vector<ScheduledEvent> events;
};

struct Scenario {
    std::string name;
    std::size_t n = 0;
    std::size_t horizon = 0;
    std::size_t trials = 1;
    SystemSpec system;
    InputProcess input = WhiteGaussian{1.0};
    NoiseProcess noise;
    std::vector<FilterSpec> filters;
    std::uint64_t master_seed = 0;
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const Scenario& scenario);

/// Realised true system for one trial (before any event).
SystemModel realize_system(const Scenario& scenario, std::size_t trial_index);

/// Squared deviation ||w_hat_n - w_n||^2 for n = 0..horizon, one row per filter.
struct TrialResult {
    std::vector<std::vector<double>> squared_deviation;
};

/// Runs every filter of the scenario against the same input, noise and system
/// realisation. Deterministic in (master_seed, trial_index).
TrialResult run_trial(const Scenario& scenario, std::size_t trial_index);

/// Across-trial statistics of one filter's squared deviation.
struct MsdTrace {
    std::string filter;
    std::vector<double> mean;          // linear MSD per iteration
    std::vector<double> standard_error;
    std::size_t trials = 0;
    std::size_t horizon = 0;
    std::uint64_t pairing_key = 0;
    /// trials x (horizon + 1), row-major; kept for paired comparisons.
    std::vector<double> per_trial;

    double at(std::size_t trial, std::size_t iteration) const
    {
        return per_trial[trial * (horizon + 1) + iteration];
    }

    std::vector<double> db() const;

    /// Mean linear MSD over the final 10% of iterations (at least one).
    double steady_state() const;

    /// Mean linear MSD over iterations [begin, end).
    double window_mean(std::size_t begin, std::size_t end) const;
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

struct RunOptions {
    /// 0 selects the default from RLMS_THREADS or the hardware.
    unsigned threads = 0;
};

unsigned default_parallelism();

/// One trace per filter, in scenario order. Results do not depend on the
/// number of threads.
std::vector<MsdTrace> run_monte_carlo(const Scenario& scenario, RunOptions options = {});

/// Iterations after `event` until the mean MSD first returns to within
/// `tolerance_db` of its mean over the `reference_window` iterations preceding
/// the event. Empty if it never does.
std::optional<std::size_t> reconvergence_time(const MsdTrace& trace, std::size_t event,
                                              std::size_t reference_window, double tolerance_db);

const MsdTrace& find_trace(const std::vector<MsdTrace>& traces, const std::string& filter);

struct DominanceReport {
    std::vector<bool> passed;
    double pass_fraction = 0.0;
};

/// Per iteration: mean(reg) <= mean(conv) + z * stderr(reg - conv), using the
/// paired per-trial differences. Throws std::invalid_argument for traces that
/// do not come from the same paired run.
DominanceReport dominance_check(const MsdTrace& regularized, const MsdTrace& conventional, double z);

struct SweepPoint {
    double factor;
    std::vector<double> probe_msd; // linear, one per swept filter
};

struct SweepResult {
    std::vector<std::string> filters;
    std::vector<SweepPoint> points;

    /// max - min of the probe MSD in dB for one filter over the sweep.
    double spread_db(std::size_t filter_index) const;
};

/// `count` log-spaced multipliers from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// Re-runs the scenario once per eta factor (multiplying the nominal eta of the
/// named filters) and records their MSD at `probe_iteration`.
SweepResult eta_sensitivity_sweep(const Scenario& scenario, const std::vector<std::string>& filters,
                                  const std::vector<double>& eta_factors,
                                  std::size_t probe_iteration, RunOptions options = {});

/// Coupled single-step comparison: both filters start from the same random
/// estimate, see the same regressor and noise, and take one step each.
struct OneStepSetup {
    std::size_t n = 50;
    std::size_t draws = 100000;
    GroupPartition partition;                 // used by the group penalty kinds
    PenaltyKind penalty = PenaltyKind::WeightedGroupL12;
    double delta = kDefaultDelta;
    StepSizePolicy step = Normalized{1.0};
    RhoPolicy rho{CorrelatedInputRho{}, 1.0};
    InputProcess input = Ar1{0.8, true};
    NoiseProcess noise{0.1};
    std::vector<Block> active_blocks;          // true system support
    double perturbation = 0.3;                 // sd of the estimate's offset from w
    double eta_slack = 0.0;                    // eta = (1 + slack) f(w)
    std::uint64_t seed = 0;
};

struct OneStepReport {
    std::size_t draws = 0;
    double mean_difference = 0.0;   // E[||w_reg - w||^2 - ||w_conv - w||^2]
    double standard_error = 0.0;
    double active_fraction = 0.0;   // share of draws with rho > 0
};

OneStepReport run_one_step_dominance(const OneStepSetup& setup);

} // namespace rlms
