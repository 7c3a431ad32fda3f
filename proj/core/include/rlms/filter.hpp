#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "rlms/penalty.hpp"
#include "rlms/types.hpp"

namespace rlms {

/// Tapped delay line [x_n, x_{n-1}, ..., x_{n-N+1}], zero-initialised.
class RegressorWindow {
public:
    explicit RegressorWindow(std::size_t n) : x_(n, 0.0) {}

    static RegressorWindow from_values(CoefficientVector values)
    {
        RegressorWindow w(0);
        w.x_ = std::move(values);
        return w;
    }

    /// Shifts every tap one position toward the tail and stores `sample` at the
    /// head. The oldest sample is dropped.
    void push(double sample) noexcept
    {
        if (x_.empty()) {
            return;
        }
        for (std::size_t i = x_.size() - 1; i > 0; --i) {
            x_[i] = x_[i - 1];
        }
        x_[0] = sample;
    }

    std::span<const double> values() const noexcept { return x_; }
    std::size_t size() const noexcept { return x_.size(); }
    double operator[](std::size_t i) const noexcept { return x_[i]; }
    double energy() const noexcept { return detail::squared_norm(x_); }

private:
    CoefficientVector x_;
};

struct ConstantMu {
    double mu;
};

/// NLMS: mu_n = alpha / ||x_n||^2.
struct Normalized {
    double alpha;
};

using StepSizePolicy = std::variant<ConstantMu, Normalized>;

/// Throws std::invalid_argument unless the step parameter is finite and positive.
void validate(const StepSizePolicy& policy);

inline bool is_normalized(const StepSizePolicy& policy) noexcept
{
    return std::holds_alternative<Normalized>(policy);
}

class FilterState {
public:
    explicit FilterState(std::size_t n) : w_hat_(n, 0.0) {}
    explicit FilterState(CoefficientVector w_hat) : w_hat_(std::move(w_hat)) {}

    std::span<const double> coefficients() const noexcept { return w_hat_; }
    std::span<double> coefficients() noexcept { return w_hat_; }
    const CoefficientVector& vector() const noexcept { return w_hat_; }
    std::size_t size() const noexcept { return w_hat_.size(); }
    std::uint64_t iteration() const noexcept { return n_; }
    void advance() noexcept { ++n_; }

private:
    CoefficientVector w_hat_;
    std::uint64_t n_ = 0;
};

/// w_hat^T x.
double predict(const FilterState& state, const RegressorWindow& x);

/// Realised step size; throws DegenerateRegressorError for a normalized policy
/// and a zero-energy regressor.
double effective_mu(const StepSizePolicy& policy, const RegressorWindow& x);

/// Conventional update w_hat += mu_n e_n x_n. Returns the a-priori error e_n.
double lms_step(FilterState& state, const RegressorWindow& x, double y,
                const StepSizePolicy& policy);

/// w_hat += mu_n e_n x_n - rho * subgrad, both terms evaluated at the incoming
/// w_hat. `subgrad` must already be scaled by the penalty weights.
void apply_update(FilterState& state, const RegressorWindow& x, double step_times_error,
                  double rho, std::span<const double> subgrad);

/// Regularized update with weights and subgradient taken at the current
/// estimate. With rho == 0 the trajectory matches lms_step bit for bit.
double regularized_step(FilterState& state, const RegressorWindow& x, double y,
                        const StepSizePolicy& policy, const Penalty& penalty, double rho);

} // namespace rlms
