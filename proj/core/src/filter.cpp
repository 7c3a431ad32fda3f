#include "rlms/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace rlms {

void validate(const StepSizePolicy& policy)
{
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            const double v = [&] {
                if constexpr (std::is_same_v<T, ConstantMu>) {
                    return p.mu;
                } else {
                    return p.alpha;
                }
            }();
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("step size parameter must be finite and positive");
            }
        },
        policy);
}

double predict(const FilterState& state, const RegressorWindow& x)
{
    detail::require_same_size(x.size(), state.size(), "regressor");
    return detail::dot(state.coefficients(), x.values());
}

double effective_mu(const StepSizePolicy& policy, const RegressorWindow& x)
{
    if (const auto* c = std::get_if<ConstantMu>(&policy)) {
        return c->mu;
    }
    const double energy = x.energy();
    if (!(energy > 0.0)) {
        throw DegenerateRegressorError("normalized step undefined for a zero-energy regressor");
    }
    return std::get<Normalized>(policy).alpha / energy;
}

double lms_step(FilterState& state, const RegressorWindow& x, double y,
                const StepSizePolicy& policy)
{
    const double e = y - predict(state, x);
    const double mu = effective_mu(policy, x);
    const double g = mu * e;
    auto w = state.coefficients();
    const auto xv = x.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = w[i] + g * xv[i];
    }
    state.advance();
    return e;
}

void apply_update(FilterState& state, const RegressorWindow& x, double step_times_error,
                  double rho, std::span<const double> subgrad)
{
    detail::require_same_size(x.size(), state.size(), "regressor");
    detail::require_same_size(subgrad.size(), state.size(), "subgradient");
    auto w = state.coefficients();
    const auto xv = x.values();
    // (w + g x) - rho s: with rho == 0 this rounds exactly like lms_step.
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = (w[i] + step_times_error * xv[i]) - rho * subgrad[i];
    }
    state.advance();
}

double regularized_step(FilterState& state, const RegressorWindow& x, double y,
                        const StepSizePolicy& policy, const Penalty& penalty, double rho)
{
    if (!(rho >= 0.0)) {
        throw std::invalid_argument("rho must be non-negative");
    }
    detail::require_same_size(penalty.size(), state.size(), "penalty");
    const double e = y - predict(state, x);
    const double mu = effective_mu(policy, x);
    const Weights weights = compute_weights(penalty, state.coefficients());
    const CoefficientVector g = subgradient(penalty, weights, state.coefficients());
    apply_update(state, x, mu * e, rho, g);
    return e;
}

} // namespace rlms
