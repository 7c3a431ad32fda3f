#include "rlms/penalty.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlms {

GroupPartition::GroupPartition(std::size_t n, const std::vector<std::vector<std::size_t>>& groups)
    : n_(n)
{
    std::vector<bool> seen(n, false);
    offsets_.reserve(groups.size() + 1);
    offsets_.push_back(0);
    indices_.reserve(n);
    for (std::size_t j = 0; j < groups.size(); ++j) {
        if (groups[j].empty()) {
            throw std::invalid_argument("group " + std::to_string(j) + " is empty");
        }
        for (std::size_t i : groups[j]) {
            if (i >= n) {
                throw std::invalid_argument("group " + std::to_string(j) + " has index " +
                                            std::to_string(i) + " outside [0, " +
                                            std::to_string(n) + ")");
            }
            if (seen[i]) {
                throw std::invalid_argument("index " + std::to_string(i) +
                                            " appears in more than one group");
            }
            seen[i] = true;
            indices_.push_back(i);
        }
        offsets_.push_back(indices_.size());
    }
    if (indices_.size() != n) {
        throw std::invalid_argument("groups cover " + std::to_string(indices_.size()) + " of " +
                                    std::to_string(n) + " indices");
    }
}

GroupPartition GroupPartition::singletons(std::size_t n)
{
    GroupPartition p;
    p.n_ = n;
    p.indices_.resize(n);
    p.offsets_.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        p.indices_[i] = i;
        p.offsets_[i] = i;
    }
    p.offsets_[n] = n;
    return p;
}

GroupPartition GroupPartition::contiguous(std::size_t n, std::size_t group_size)
{
    if (group_size == 0) {
        throw std::invalid_argument("group size must be positive");
    }
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t start = 0; start < n; start += group_size) {
        std::vector<std::size_t> g;
        for (std::size_t i = start; i < std::min(n, start + group_size); ++i) {
            g.push_back(i);
        }
        groups.push_back(std::move(g));
    }
    return GroupPartition(n, groups);
}

std::vector<std::vector<std::size_t>> GroupPartition::groups() const
{
    std::vector<std::vector<std::size_t>> out;
    out.reserve(group_count());
    for (std::size_t j = 0; j < group_count(); ++j) {
        auto g = group(j);
        out.emplace_back(g.begin(), g.end());
    }
    return out;
}

std::string_view to_string(PenaltyKind kind)
{
    switch (kind) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::WeightedL1: return "weighted_l1";
    case PenaltyKind::GroupL12: return "group_l12";
    case PenaltyKind::WeightedGroupL12: return "weighted_group_l12";
    }
    return "unknown";
}

PenaltyKind penalty_kind_from_string(std::string_view name)
{
    for (auto k : {PenaltyKind::L1, PenaltyKind::WeightedL1, PenaltyKind::GroupL12,
                   PenaltyKind::WeightedGroupL12}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown penalty kind '" + std::string(name) + "'");
}

Penalty::Penalty(PenaltyKind kind, GroupPartition partition, double delta)
    : kind_(kind), partition_(std::move(partition)), delta_(delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("penalty delta must be a finite positive number");
    }
}

Penalty Penalty::l1(std::size_t n, double delta)
{
    return {PenaltyKind::L1, GroupPartition::singletons(n), delta};
}

Penalty Penalty::weighted_l1(std::size_t n, double delta)
{
    return {PenaltyKind::WeightedL1, GroupPartition::singletons(n), delta};
}

Penalty Penalty::group_l12(GroupPartition partition, double delta)
{
    return {PenaltyKind::GroupL12, std::move(partition), delta};
}

Penalty Penalty::weighted_group_l12(GroupPartition partition, double delta)
{
    return {PenaltyKind::WeightedGroupL12, std::move(partition), delta};
}

double group_norm(std::span<const double> v, std::span<const std::size_t> group)
{
    double acc = 0.0;
    for (std::size_t i : group) {
        acc += v[i] * v[i];
    }
    return std::sqrt(acc);
}

namespace {

void check_weights(const Penalty& penalty, const Weights& weights)
{
    const std::size_t expected =
        penalty.is_group() ? penalty.partition().group_count() : penalty.size();
    detail::require_same_size(weights.beta.size(), expected, "weights");
}

} // namespace

void compute_weights_into(const Penalty& penalty, std::span<const double> w_ref, Weights& out)
{
    detail::require_same_size(w_ref.size(), penalty.size(), "reference coefficients");
    const double delta = penalty.delta();
    switch (penalty.kind()) {
    case PenaltyKind::L1:
        out.beta.assign(penalty.size(), 1.0);
        break;
    case PenaltyKind::GroupL12:
        out.beta.assign(penalty.partition().group_count(), 1.0);
        break;
    case PenaltyKind::WeightedL1:
        out.beta.resize(w_ref.size());
        for (std::size_t i = 0; i < w_ref.size(); ++i) {
            out.beta[i] = 1.0 / (std::abs(w_ref[i]) + delta);
        }
        break;
    case PenaltyKind::WeightedGroupL12: {
        const auto& part = penalty.partition();
        out.beta.resize(part.group_count());
        for (std::size_t j = 0; j < part.group_count(); ++j) {
            out.beta[j] = 1.0 / (group_norm(w_ref, part.group(j)) + delta);
        }
        break;
    }
    }
}

Weights compute_weights(const Penalty& penalty, std::span<const double> w_ref)
{
    Weights w;
    compute_weights_into(penalty, w_ref, w);
    return w;
}

double evaluate(const Penalty& penalty, const Weights& weights, std::span<const double> w)
{
    detail::require_same_size(w.size(), penalty.size(), "coefficients");
    check_weights(penalty, weights);
    double acc = 0.0;
    if (penalty.is_group()) {
        const auto& part = penalty.partition();
        for (std::size_t j = 0; j < part.group_count(); ++j) {
            acc += weights.beta[j] * group_norm(w, part.group(j));
        }
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += weights.beta[i] * std::abs(w[i]);
        }
    }
    return acc;
}

void subgradient_into(const Penalty& penalty, const Weights& weights,
                      std::span<const double> w, std::span<double> out)
{
    detail::require_same_size(w.size(), penalty.size(), "coefficients");
    detail::require_same_size(out.size(), penalty.size(), "subgradient output");
    check_weights(penalty, weights);
    if (penalty.is_group()) {
        const auto& part = penalty.partition();
        const double delta = penalty.delta();
        for (std::size_t j = 0; j < part.group_count(); ++j) {
            const auto g = part.group(j);
            const double scale = weights.beta[j] / (group_norm(w, g) + delta);
            for (std::size_t i : g) {
                out[i] = scale * w[i];
            }
        }
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) {
            out[i] = weights.beta[i] * sign(w[i]);
        }
    }
}

CoefficientVector subgradient(const Penalty& penalty, const Weights& weights,
                              std::span<const double> w)
{
    CoefficientVector out(w.size());
    subgradient_into(penalty, weights, w, out);
    return out;
}

} // namespace rlms
