#include "rlms/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace rlms {

double EtaSpec::resolve(const std::optional<Penalty>& penalty, std::span<const double> w_true) const
{
    if (mode == Mode::Fixed || !penalty) {
        return factor * value;
    }
    const auto& part = penalty->partition();
    double truth = 0.0;
    switch (penalty->kind()) {
    case PenaltyKind::L1:
    case PenaltyKind::GroupL12:
        truth = evaluate(*penalty, compute_weights(*penalty, w_true), w_true);
        break;
    case PenaltyKind::WeightedL1:
        truth = static_cast<double>(support_size(w_true));
        break;
    case PenaltyKind::WeightedGroupL12:
        for (std::size_t j = 0; j < part.group_count(); ++j) {
            if (group_norm(w_true, part.group(j)) > 0.0) {
                truth += 1.0;
            }
        }
        break;
    }
    return factor * truth;
}

void validate(const Scenario& s)
{
    if (s.n == 0) {
        throw std::invalid_argument("filter length N must be positive");
    }
    if (s.trials == 0) {
        throw std::invalid_argument("trials must be at least 1");
    }
    if (s.filters.empty()) {
        throw std::invalid_argument("scenario has no filters");
    }
    validate(s.input);
    if (!(s.noise.variance >= 0.0) || !std::isfinite(s.noise.variance)) {
        throw std::invalid_argument("noise variance must be finite and non-negative");
    }
    if (const auto* g = std::get_if<GeneralSparseSpec>(&s.system.kind); g && g->k > s.n) {
        throw std::invalid_argument("support size k exceeds N");
    }
    if (const auto* g = std::get_if<GroupSparseSpec>(&s.system.kind)) {
        std::vector<bool> used(s.n, false);
        for (const auto& b : g->blocks) {
            if (b.length == 0 || b.start >= s.n || b.length > s.n - b.start) {
                throw std::invalid_argument("system block out of range");
            }
            for (std::size_t i = b.start; i < b.start + b.length; ++i) {
                if (used[i]) {
                    throw std::invalid_argument("system blocks overlap");
                }
                used[i] = true;
            }
        }
    }
    for (std::size_t i = 1; i < s.system.events.size(); ++i) {
        if (s.system.events[i].iteration < s.system.events[i - 1].iteration) {
            throw std::invalid_argument("tracking events must be sorted by iteration");
        }
    }
    for (std::size_t i = 0; i < s.filters.size(); ++i) {
        const auto& f = s.filters[i];
        if (f.name.empty()) {
            throw std::invalid_argument("filter " + std::to_string(i) + " has no name");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (s.filters[j].name == f.name) {
                throw std::invalid_argument("duplicate filter name '" + f.name + "'");
            }
        }
        if (f.penalty && f.penalty->size() != s.n) {
            throw std::invalid_argument("filter '" + f.name + "' penalty length differs from N");
        }
        if (!(f.eta.factor > 0.0) || (f.eta.mode == EtaSpec::Mode::Fixed && !(f.eta.value >= 0.0))) {
            throw std::invalid_argument("filter '" + f.name + "' has an invalid eta");
        }
        // Constructing the filter runs the step/rho compatibility checks.
        try {
            AdaptiveFilter probe(s.n, f.step, f.penalty, f.rho, 0.0);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("filter '" + f.name + "': " + e.what());
        }
    }
}

SystemModel realize_system(const Scenario& s, std::size_t trial_index)
{
    auto rng = RandomStream::derive(s.master_seed, trial_index, StreamRole::System);
    SystemModel model = std::visit(
        [&](const auto& kind) -> SystemModel {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, GeneralSparseSpec>) {
                return make_general_sparse_system(s.n, kind.k, rng);
            } else {
                return make_group_sparse_system(s.n, kind.blocks, rng);
            }
        },
        s.system.kind);
    model.events = s.system.events;
    return model;
}

TrialResult run_trial(const Scenario& s, std::size_t trial_index)
{
    SystemModel system = realize_system(s, trial_index);
    InputGenerator input(s.input, RandomStream::derive(s.master_seed, trial_index, StreamRole::Input));
    auto noise_rng = RandomStream::derive(s.master_seed, trial_index, StreamRole::Noise);
    auto event_rng = RandomStream::derive(s.master_seed, trial_index, StreamRole::Events);

    std::vector<AdaptiveFilter> bank;
    bank.reserve(s.filters.size());
    for (const auto& f : s.filters) {
        bank.emplace_back(s.n, f.step, f.penalty, f.rho, f.eta.resolve(f.penalty, system.w));
    }

    TrialResult out;
    out.squared_deviation.assign(s.filters.size(), std::vector<double>(s.horizon + 1, 0.0));
    RegressorWindow x(s.n);
    std::size_t next_event = 0;
    for (std::size_t it = 0; it <= s.horizon; ++it) {
        while (next_event < system.events.size() && system.events[next_event].iteration == it) {
            apply_event(system.w, system.events[next_event].event, event_rng);
            ++next_event;
        }
        for (std::size_t f = 0; f < bank.size(); ++f) {
            out.squared_deviation[f][it] =
                detail::squared_distance(bank[f].state().coefficients(), system.w);
        }
        if (it == s.horizon) {
            break;
        }
        x.push(input.next());
        const double y = desired_output(system.w, x.values(), s.noise, noise_rng);
        for (auto& filter : bank) {
            filter.step(x, y);
        }
    }
    return out;
}

std::vector<double> MsdTrace::db() const
{
    std::vector<double> out(mean.size());
    std::transform(mean.begin(), mean.end(), out.begin(), to_db);
    return out;
}

double MsdTrace::steady_state() const
{
    if (mean.empty()) {
        return 0.0;
    }
    const std::size_t window = std::max<std::size_t>(1, mean.size() / 10);
    double acc = 0.0;
    for (std::size_t i = mean.size() - window; i < mean.size(); ++i) {
        acc += mean[i];
    }
    return acc / static_cast<double>(window);
}

double MsdTrace::window_mean(std::size_t begin, std::size_t end) const
{
    if (begin >= end || end > mean.size()) {
        throw std::out_of_range("invalid MSD window");
    }
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        acc += mean[i];
    }
    return acc / static_cast<double>(end - begin);
}

std::optional<std::size_t> reconvergence_time(const MsdTrace& trace, std::size_t event,
                                              std::size_t reference_window, double tolerance_db)
{
    if (reference_window == 0 || reference_window > event || event >= trace.mean.size()) {
        throw std::out_of_range("invalid re-convergence window");
    }
    const double target = to_db(trace.window_mean(event - reference_window, event)) + tolerance_db;
    for (std::size_t i = event; i < trace.mean.size(); ++i) {
        if (to_db(trace.mean[i]) <= target) {
            return i - event;
        }
    }
    return std::nullopt;
}

unsigned default_parallelism()
{
    if (const char* env = std::getenv("RLMS_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::uint64_t pairing_key_for(const Scenario& s)
{
    std::uint64_t k = detail::mix64(s.master_seed);
    k = detail::mix64(k ^ s.n);
    k = detail::mix64(k ^ (s.horizon << 1));
    k = detail::mix64(k ^ (s.trials << 2));
    for (char c : s.name) {
        k = detail::mix64(k ^ static_cast<unsigned char>(c));
    }
    return k;
}

} // namespace

std::vector<MsdTrace> run_monte_carlo(const Scenario& s, RunOptions options)
{
    validate(s);
    const std::size_t stride = s.horizon + 1;
    const std::uint64_t key = pairing_key_for(s);
    std::vector<MsdTrace> traces(s.filters.size());
    for (std::size_t f = 0; f < s.filters.size(); ++f) {
        traces[f].filter = s.filters[f].name;
        traces[f].trials = s.trials;
        traces[f].horizon = s.horizon;
        traces[f].pairing_key = key;
        traces[f].per_trial.assign(s.trials * stride, 0.0);
    }

    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(
        options.threads == 0 ? default_parallelism() : options.threads, s.trials));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < s.trials; t = next++) {
            try {
                TrialResult r = run_trial(s, t);
                for (std::size_t f = 0; f < s.filters.size(); ++f) {
                    std::copy(r.squared_deviation[f].begin(), r.squared_deviation[f].end(),
                              traces[f].per_trial.begin() + static_cast<std::ptrdiff_t>(t * stride));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = s.trials;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // Reduction in trial order, independent of scheduling.
    const double count = static_cast<double>(s.trials);
    for (auto& tr : traces) {
        tr.mean.assign(stride, 0.0);
        tr.standard_error.assign(stride, 0.0);
        for (std::size_t t = 0; t < s.trials; ++t) {
            for (std::size_t i = 0; i < stride; ++i) {
                tr.mean[i] += tr.per_trial[t * stride + i];
            }
        }
        for (double& m : tr.mean) {
            m /= count;
        }
        if (s.trials > 1) {
            for (std::size_t i = 0; i < stride; ++i) {
                double ss = 0.0;
                for (std::size_t t = 0; t < s.trials; ++t) {
                    const double d = tr.per_trial[t * stride + i] - tr.mean[i];
                    ss += d * d;
                }
                tr.standard_error[i] = std::sqrt(ss / (count - 1.0) / count);
            }
        }
    }
    return traces;
}

const MsdTrace& find_trace(const std::vector<MsdTrace>& traces, const std::string& filter)
{
    for (const auto& t : traces) {
        if (t.filter == filter) {
            return t;
        }
    }
    throw std::invalid_argument("no trace for filter '" + filter + "'");
}

DominanceReport dominance_check(const MsdTrace& reg, const MsdTrace& conv, double z)
{
    if (reg.pairing_key != conv.pairing_key || reg.trials != conv.trials ||
        reg.horizon != conv.horizon || reg.per_trial.size() != conv.per_trial.size() ||
        reg.per_trial.size() != reg.trials * (reg.horizon + 1)) {
        throw std::invalid_argument("dominance check needs traces from the same paired run");
    }
    const std::size_t stride = reg.horizon + 1;
    const double count = static_cast<double>(reg.trials);
    DominanceReport report;
    report.passed.resize(stride);
    std::size_t passes = 0;
    for (std::size_t i = 0; i < stride; ++i) {
        double mean = 0.0;
        for (std::size_t t = 0; t < reg.trials; ++t) {
            mean += reg.at(t, i) - conv.at(t, i);
        }
        mean /= count;
        double se = 0.0;
        if (reg.trials > 1) {
            double ss = 0.0;
            for (std::size_t t = 0; t < reg.trials; ++t) {
                const double d = reg.at(t, i) - conv.at(t, i) - mean;
                ss += d * d;
            }
            se = std::sqrt(ss / (count - 1.0) / count);
        }
        const bool ok = mean <= z * se;
        report.passed[i] = ok;
        passes += ok ? 1 : 0;
    }
    report.pass_fraction = static_cast<double>(passes) / static_cast<double>(stride);
    return report;
}

double SweepResult::spread_db(std::size_t filter_index) const
{
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    for (const auto& p : points) {
        const double v = to_db(p.probe_msd[filter_index]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count)
{
    if (count == 0 || !(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("log_spaced needs 0 < lo <= hi and count >= 1");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

SweepResult eta_sensitivity_sweep(const Scenario& s, const std::vector<std::string>& filters,
                                  const std::vector<double>& eta_factors,
                                  std::size_t probe_iteration, RunOptions options)
{
    if (probe_iteration > s.horizon) {
        throw std::invalid_argument("probe iteration lies beyond the horizon");
    }
    Scenario base = s;
    base.filters.clear();
    for (const auto& name : filters) {
        auto it = std::find_if(s.filters.begin(), s.filters.end(),
                               [&](const FilterSpec& f) { return f.name == name; });
        if (it == s.filters.end()) {
            throw std::invalid_argument("sweep names unknown filter '" + name + "'");
        }
        base.filters.push_back(*it);
    }
    // Only the probe is needed; trials share realisations across factors.
    base.horizon = probe_iteration;

    SweepResult result;
    result.filters = filters;
    for (double factor : eta_factors) {
        Scenario run = base;
        for (auto& f : run.filters) {
            f.eta.factor *= factor;
        }
        const auto traces = run_monte_carlo(run, options);
        SweepPoint point{factor, {}};
        for (const auto& tr : traces) {
            point.probe_msd.push_back(tr.mean[probe_iteration]);
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

OneStepReport run_one_step_dominance(const OneStepSetup& setup)
{
    const std::size_t n = setup.n;
    validate(setup.step);
    validate(setup.rho);
    const Penalty penalty = [&] {
        switch (setup.penalty) {
        case PenaltyKind::L1: return Penalty::l1(n, setup.delta);
        case PenaltyKind::WeightedL1: return Penalty::weighted_l1(n, setup.delta);
        case PenaltyKind::GroupL12: return Penalty::group_l12(setup.partition, setup.delta);
        case PenaltyKind::WeightedGroupL12:
        default: return Penalty::weighted_group_l12(setup.partition, setup.delta);
        }
    }();

    OneStepReport report;
    report.draws = setup.draws;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t active = 0;
    Weights weights;
    CoefficientVector g(n);
    for (std::size_t d = 0; d < setup.draws; ++d) {
        auto sys_rng = RandomStream::derive(setup.seed, d, StreamRole::System);
        auto est_rng = RandomStream::derive(setup.seed, d, StreamRole::Harness);
        auto noise_rng = RandomStream::derive(setup.seed, d, StreamRole::Noise);
        const SystemModel truth = make_group_sparse_system(n, setup.active_blocks, sys_rng);

        CoefficientVector start = truth.w;
        for (double& v : start) {
            v += setup.perturbation * est_rng.normal();
        }
        InputGenerator gen(setup.input, RandomStream::derive(setup.seed, d, StreamRole::Input));
        RegressorWindow x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x.push(gen.next());
        }

        compute_weights_into(penalty, start, weights);
        subgradient_into(penalty, weights, start, g);
        const double f_val = evaluate(penalty, weights, start);
        const double eta = (1.0 + setup.eta_slack) * evaluate(penalty, weights, truth.w);
        const double mu = effective_mu(setup.step, x);
        const RhoInputs in{setup.step, mu, start, x.values(), g, detail::squared_norm(g),
                           f_val, eta, weights, penalty};
        const double rho = select_rho(setup.rho, in);
        active += rho > 0.0 ? 1 : 0;

        const double y = desired_output(truth.w, x.values(), setup.noise, noise_rng);
        FilterState conventional(start);
        FilterState regularized(start);
        const double e = lms_step(conventional, x, y, setup.step);
        apply_update(regularized, x, mu * e, rho, g);
        const double diff = detail::squared_distance(regularized.coefficients(), truth.w) -
                            detail::squared_distance(conventional.coefficients(), truth.w);
        sum += diff;
        sum_sq += diff * diff;
    }
    const double count = static_cast<double>(setup.draws);
    report.mean_difference = sum / count;
    if (setup.draws > 1) {
        const double var = std::max(0.0, (sum_sq - count * report.mean_difference * report.mean_difference) / (count - 1.0));
        report.standard_error = std::sqrt(var / count);
    }
    report.active_fraction = static_cast<double>(active) / count;
    return report;
}

} // namespace rlms
