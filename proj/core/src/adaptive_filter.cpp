#include "rlms/adaptive_filter.hpp"

#include <stdexcept>

namespace rlms {

AdaptiveFilter::AdaptiveFilter(std::size_t n, StepSizePolicy step, std::optional<Penalty> penalty,
                               RhoPolicy rho, double eta)
    : state_(n), step_(step), penalty_(std::move(penalty)), rho_(rho), eta_(eta), subgrad_(n, 0.0)
{
    validate(step_);
    validate(rho_);
    if (penalty_) {
        detail::require_same_size(penalty_->size(), n, "penalty");
    }
    if (std::holds_alternative<WhiteInputLmsRho>(rho_.rule) && is_normalized(step_)) {
        throw std::invalid_argument("white-input LMS rho rule needs a constant step");
    }
    if (std::holds_alternative<WhiteInputNlmsRho>(rho_.rule) && !is_normalized(step_)) {
        throw std::invalid_argument("white-input NLMS rho rule needs a normalized step");
    }
}

double AdaptiveFilter::step(const RegressorWindow& x, double y)
{
    const double e = y - predict(state_, x);
    if (is_normalized(step_) && !(x.energy() > 0.0)) {
        last_rho_ = 0.0;
        state_.advance();
        return e;
    }
    const double mu = effective_mu(step_, x);
    if (!penalty_) {
        lms_step(state_, x, y, step_);
        last_rho_ = 0.0;
        return e;
    }

    const auto w_hat = state_.coefficients();
    compute_weights_into(*penalty_, w_hat, weights_);
    subgradient_into(*penalty_, weights_, w_hat, subgrad_);
    const double f_val = evaluate(*penalty_, weights_, w_hat);
    const double g2 = detail::squared_norm(subgrad_);
    const RhoInputs in{step_, mu, w_hat, x.values(), subgrad_, g2, f_val, eta_, weights_, *penalty_};
    last_rho_ = select_rho(rho_, in);
    apply_update(state_, x, mu * e, last_rho_, subgrad_);
    return e;
}

} // namespace rlms
