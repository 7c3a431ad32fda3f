#pragma once

#include <span>
#include <variant>

#include "rlms/filter.hpp"
#include "rlms/penalty.hpp"

namespace rlms {

struct FixedRho {
    double rho;
};

/// White-input LMS rule; needs the input variance.
struct WhiteInputLmsRho {
    double sigma_x2;
};

/// White-input NLMS rule.
struct WhiteInputNlmsRho {};

/// Rule valid for any wide-sense stationary input.
struct CorrelatedInputRho {};

using RhoRule = std::variant<FixedRho, WhiteInputLmsRho, WhiteInputNlmsRho, CorrelatedInputRho>;

/// The deployed regularization step is scale * rho*. Dominance holds for
/// scale in (0, 2].
struct RhoPolicy {
    RhoRule rule = FixedRho{0.0};
    double scale = 1.0;
};

void validate(const RhoPolicy& policy);

/// max{(1 - mu sigma_x^2)(f - eta) / ||g||^2, 0}; 0 when ||g||^2 == 0.
double rho_star_lms(double mu, double sigma_x2, double f_val, double eta, double subgrad_norm2);

/// max{(1 - alpha / N)(f - eta) / ||g||^2, 0}; 0 when ||g||^2 == 0.
double rho_star_nlms(double alpha, std::size_t n, double f_val, double eta, double subgrad_norm2);

/// Correlation correction for the WSS rule:
///   (w_hat^T x)(x^T g) + eta * max_j{||x_{I_j}|| / beta_j} * |x^T g|.
double correlated_input_term(std::span<const double> w_hat, std::span<const double> x,
                             std::span<const double> subgrad, double eta,
                             const Weights& weights, const GroupPartition& partition);

/// max{(f - eta - mu r) / ||g||^2, 0}; 0 when ||g||^2 == 0.
double rho_star_correlated(double mu_eff, double f_val, double eta, double r,
                           double subgrad_norm2);

/// Everything a rho rule may look at during one iteration. All quantities are
/// taken at the incoming estimate.
struct RhoInputs {
    const StepSizePolicy& step;
    double mu_eff;
    std::span<const double> w_hat;
    std::span<const double> x;
    std::span<const double> subgrad;
    double subgrad_norm2;
    double f_val;
    double eta;
    const Weights& weights;
    const Penalty& penalty;
};

/// scale * rho* for the policy's rule. Throws std::invalid_argument if the
/// rule does not fit the step policy (white-input LMS rule with a normalized
/// step or vice versa).
double select_rho(const RhoPolicy& policy, const RhoInputs& in);

} // namespace rlms
