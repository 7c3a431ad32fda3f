#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rlms/types.hpp"

namespace rlms {

/// Disjoint cover of {0, ..., N-1} by non-empty index groups. Groups need not
/// be contiguous.
class GroupPartition {
public:
    GroupPartition() = default;

    /// Validates that `groups` is a partition of {0, ..., n-1}; throws
    /// std::invalid_argument otherwise.
    GroupPartition(std::size_t n, const std::vector<std::vector<std::size_t>>& groups);

    static GroupPartition singletons(std::size_t n);

    /// Consecutive blocks of `group_size` taps; the final block may be shorter.
    static GroupPartition contiguous(std::size_t n, std::size_t group_size);

    std::size_t size() const noexcept { return n_; }
    std::size_t group_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<const std::size_t> group(std::size_t j) const
    {
        return {indices_.data() + offsets_[j], offsets_[j + 1] - offsets_[j]};
    }

    bool all_singletons() const noexcept { return group_count() == n_; }

    std::vector<std::vector<std::size_t>> groups() const;

    friend bool operator==(const GroupPartition&, const GroupPartition&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> indices_;
    std::vector<std::size_t> offsets_;
};

enum class PenaltyKind { L1, WeightedL1, GroupL12, WeightedGroupL12 };

std::string_view to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(std::string_view name);

inline constexpr double kDefaultDelta = 0.01;

/// One of the four convex sparsity penalties. Scalar kinds carry an implied
/// all-singleton partition.
class Penalty {
public:
    static Penalty l1(std::size_t n, double delta = kDefaultDelta);
    static Penalty weighted_l1(std::size_t n, double delta = kDefaultDelta);
    static Penalty group_l12(GroupPartition partition, double delta = kDefaultDelta);
    static Penalty weighted_group_l12(GroupPartition partition, double delta = kDefaultDelta);

    PenaltyKind kind() const noexcept { return kind_; }
    const GroupPartition& partition() const noexcept { return partition_; }
    double delta() const noexcept { return delta_; }
    std::size_t size() const noexcept { return partition_.size(); }

    bool is_weighted() const noexcept
    {
        return kind_ == PenaltyKind::WeightedL1 || kind_ == PenaltyKind::WeightedGroupL12;
    }
    bool is_group() const noexcept
    {
        return kind_ == PenaltyKind::GroupL12 || kind_ == PenaltyKind::WeightedGroupL12;
    }

    friend bool operator==(const Penalty&, const Penalty&) = default;

private:
    Penalty(PenaltyKind kind, GroupPartition partition, double delta);

    PenaltyKind kind_ = PenaltyKind::L1;
    GroupPartition partition_;
    double delta_ = kDefaultDelta;
};

/// Reweighting coefficients, one per group (per coefficient for scalar kinds).
/// Frozen for the duration of one filter iteration.
struct Weights {
    std::vector<double> beta;
};

Weights compute_weights(const Penalty& penalty, std::span<const double> w_ref);
void compute_weights_into(const Penalty& penalty, std::span<const double> w_ref, Weights& out);

/// Penalty value with the weights held fixed. Group norms are unsmoothed.
double evaluate(const Penalty& penalty, const Weights& weights, std::span<const double> w);

/// Scalar kinds: beta_i * sgn(w_i), sgn(0) = 0.
/// Group kinds: beta_j * w_I / (||w_I||_2 + delta).
CoefficientVector subgradient(const Penalty& penalty, const Weights& weights,
                              std::span<const double> w);
void subgradient_into(const Penalty& penalty, const Weights& weights,
                      std::span<const double> w, std::span<double> out);

/// sgn(0) == 0.
inline double sign(double x) noexcept
{
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

/// Euclidean norm of the subvector of `v` indexed by `group`.
double group_norm(std::span<const double> v, std::span<const std::size_t> group);

} // namespace rlms
