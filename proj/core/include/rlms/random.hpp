#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace rlms {

/// Independent purposes a trial draws randomness for. Each (trial, role)
/// pair maps to its own stream so that filters compared within a trial see
/// identical realisations.
enum class StreamRole : std::uint64_t {
    System = 1,
    Input = 2,
    Noise = 3,
    Events = 4,
    Harness = 5,
};

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based generator: the i-th output is a bijective mix of
/// key + i * golden. Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

    static RandomStream derive(std::uint64_t master_seed, std::uint64_t trial, StreamRole role) noexcept
    {
        std::uint64_t k = detail::mix64(master_seed + detail::kGolden);
        k = detail::mix64(k ^ detail::mix64(trial + 0x632BE59BD9B4E019ull));
        k = detail::mix64(k ^ detail::mix64(static_cast<std::uint64_t>(role) * 0x8CB92BA72F3D8DD7ull));
        return RandomStream(k);
    }

    /// A child stream keyed off this one and `index`; does not advance this stream.
    RandomStream split(std::uint64_t index) const noexcept
    {
        return RandomStream(detail::mix64(key_ ^ detail::mix64(index + detail::kGolden)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double normal() { return normal_(*this); }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace rlms
