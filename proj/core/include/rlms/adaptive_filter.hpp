#pragma once

#include <optional>

#include "rlms/filter.hpp"
#include "rlms/penalty.hpp"
#include "rlms/rho.hpp"

namespace rlms {

/// A single adaptive filter: step policy, optional penalty and rho rule.
/// Without a penalty it is the conventional LMS/NLMS filter.
class AdaptiveFilter {
public:
    AdaptiveFilter(std::size_t n, StepSizePolicy step, std::optional<Penalty> penalty,
                   RhoPolicy rho, double eta);

    /// One iteration at sample (x, y). Zero-energy regressors under a
    /// normalized step leave the state untouched. Returns the a-priori error.
    double step(const RegressorWindow& x, double y);

    const FilterState& state() const noexcept { return state_; }
    FilterState& state() noexcept { return state_; }
    double last_rho() const noexcept { return last_rho_; }
    double eta() const noexcept { return eta_; }

private:
    FilterState state_;
    StepSizePolicy step_;
    std::optional<Penalty> penalty_;
    RhoPolicy rho_;
    double eta_;
    Weights weights_;
    CoefficientVector subgrad_;
    double last_rho_ = 0.0;
};

} // namespace rlms
