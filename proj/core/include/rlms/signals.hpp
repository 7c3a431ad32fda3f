#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "rlms/random.hpp"
#include "rlms/types.hpp"

namespace rlms {

struct ShiftLeft {
    std::size_t taps;
};
struct ShiftRight {
    std::size_t taps;
};
/// Redraws the values on the current support from N(0, 1).
struct ResetActiveValues {};

using TrackingEvent = std::variant<ShiftLeft, ShiftRight, ResetActiveValues>;

struct ScheduledEvent {
    std::size_t iteration;
    TrackingEvent event;
};

/// True response w plus the changes it undergoes during a run, sorted by
/// iteration.
struct SystemModel {
    CoefficientVector w;
    std::vector<ScheduledEvent> events;
};

/// Exactly k non-zero N(0,1) taps at distinct uniformly random positions.
SystemModel make_general_sparse_system(std::size_t n, std::size_t k, RandomStream& rng);

struct Block {
    std::size_t start;
    std::size_t length;
};

/// N(0,1) values on the union of the (disjoint, in-range) blocks, zero elsewhere.
SystemModel make_group_sparse_system(std::size_t n, std::span<const Block> blocks, RandomStream& rng);

/// Shifts clip at the ends of the vector; reset keeps the support.
void apply_event(CoefficientVector& w, const TrackingEvent& event, RandomStream& rng);

/// Number of non-zero entries.
std::size_t support_size(std::span<const double> w);

struct WhiteGaussian {
    double variance = 1.0;
};

/// x_n = a x_{n-1} + u_n with unit-variance innovations. With `normalize`
/// the output is scaled by sqrt(1 - a^2) so its stationary variance is 1.
struct Ar1 {
    double a = 0.8;
    bool normalize = true;
};

using InputProcess = std::variant<WhiteGaussian, Ar1>;

void validate(const InputProcess& process);

/// Stationary variance of the emitted samples.
double stationary_variance(const InputProcess& process);

/// Sample stream for one InputProcess. AR(1) starts from its stationary
/// distribution.
class InputGenerator {
public:
    InputGenerator(const InputProcess& process, RandomStream rng);

    double next();

private:
    InputProcess process_;
    RandomStream rng_;
    double state_ = 0.0;
    double scale_ = 1.0;
};

struct NoiseProcess {
    double variance = 0.0;
};

/// w^T x + v with v ~ N(0, noise.variance) drawn from `noise_rng`.
double desired_output(std::span<const double> w, std::span<const double> x,
                      const NoiseProcess& noise, RandomStream& noise_rng);

} // namespace rlms
