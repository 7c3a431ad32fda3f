#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlms {

/// Dense real coefficient vector. Used for both the filter estimate and the
/// true system response.
using CoefficientVector = std::vector<double>;

/// Raised when two vectors (or a vector and a partition) disagree on length.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the normalized step policy when the regressor has zero energy.
class DegenerateRegressorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

inline double squared_norm(std::span<const double> a)
{
    return dot(a, a);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace detail
} // namespace rlms
