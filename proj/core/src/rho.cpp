#include "rlms/rho.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlms {

void validate(const RhoPolicy& policy)
{
    if (!(policy.scale > 0.0 && policy.scale <= 2.0)) {
        throw std::invalid_argument("rho scale must lie in (0, 2]");
    }
    if (const auto* f = std::get_if<FixedRho>(&policy.rule); f && !(f->rho >= 0.0)) {
        throw std::invalid_argument("fixed rho must be non-negative");
    }
    if (const auto* w = std::get_if<WhiteInputLmsRho>(&policy.rule); w && !(w->sigma_x2 > 0.0)) {
        throw std::invalid_argument("input variance must be positive");
    }
}

namespace {

double clamped_ratio(double numerator, double subgrad_norm2)
{
    if (!(subgrad_norm2 > 0.0)) {
        return 0.0;
    }
    return std::max(numerator / subgrad_norm2, 0.0);
}

} // namespace

double rho_star_lms(double mu, double sigma_x2, double f_val, double eta, double subgrad_norm2)
{
    return clamped_ratio((1.0 - mu * sigma_x2) * (f_val - eta), subgrad_norm2);
}

double rho_star_nlms(double alpha, std::size_t n, double f_val, double eta, double subgrad_norm2)
{
    return clamped_ratio((1.0 - alpha / static_cast<double>(n)) * (f_val - eta), subgrad_norm2);
}

double correlated_input_term(std::span<const double> w_hat, std::span<const double> x,
                             std::span<const double> subgrad, double eta,
                             const Weights& weights, const GroupPartition& partition)
{
    detail::require_same_size(x.size(), w_hat.size(), "regressor");
    detail::require_same_size(subgrad.size(), w_hat.size(), "subgradient");
    detail::require_same_size(partition.size(), w_hat.size(), "partition");
    detail::require_same_size(weights.beta.size(), partition.group_count(), "weights");

    const double wx = detail::dot(w_hat, x);
    const double xg = detail::dot(x, subgrad);
    double worst = 0.0;
    for (std::size_t j = 0; j < partition.group_count(); ++j) {
        worst = std::max(worst, group_norm(x, partition.group(j)) / weights.beta[j]);
    }
    return wx * xg + eta * worst * std::abs(xg);
}

double rho_star_correlated(double mu_eff, double f_val, double eta, double r,
                           double subgrad_norm2)
{
    return clamped_ratio(f_val - eta - mu_eff * r, subgrad_norm2);
}

double select_rho(const RhoPolicy& policy, const RhoInputs& in)
{
    const double rho_star = std::visit(
        [&](const auto& rule) -> double {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, FixedRho>) {
                return rule.rho;
            } else if constexpr (std::is_same_v<T, WhiteInputLmsRho>) {
                const auto* c = std::get_if<ConstantMu>(&in.step);
                if (c == nullptr) {
                    throw std::invalid_argument("white-input LMS rho rule needs a constant step");
                }
                return rho_star_lms(c->mu, rule.sigma_x2, in.f_val, in.eta, in.subgrad_norm2);
            } else if constexpr (std::is_same_v<T, WhiteInputNlmsRho>) {
                const auto* nrm = std::get_if<Normalized>(&in.step);
                if (nrm == nullptr) {
                    throw std::invalid_argument("white-input NLMS rho rule needs a normalized step");
                }
                return rho_star_nlms(nrm->alpha, in.w_hat.size(), in.f_val, in.eta,
                                     in.subgrad_norm2);
            } else {
                // Scalar kinds fall back to singleton groups, which the partition already is.
                const double r = correlated_input_term(in.w_hat, in.x, in.subgrad, in.eta,
                                                       in.weights, in.penalty.partition());
                return rho_star_correlated(in.mu_eff, in.f_val, in.eta, r, in.subgrad_norm2);
            }
        },
        policy.rule);
    return policy.scale * rho_star;
}

} // namespace rlms
