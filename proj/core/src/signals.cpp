#include "rlms/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rlms {

SystemModel make_general_sparse_system(std::size_t n, std::size_t k, RandomStream& rng)
{
    if (k > n) {
        throw std::invalid_argument("support size " + std::to_string(k) +
                                    " exceeds filter length " + std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k entries become the support.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t span = n - i;
        const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(span));
        std::swap(idx[i], idx[std::min(j, n - 1)]);
    }
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    SystemModel model{CoefficientVector(n, 0.0), {}};
    for (std::size_t i = 0; i < k; ++i) {
        double v = rng.normal();
        while (v == 0.0) {
            v = rng.normal();
        }
        model.w[idx[i]] = v;
    }
    return model;
}

SystemModel make_group_sparse_system(std::size_t n, std::span<const Block> blocks, RandomStream& rng)
{
    std::vector<bool> used(n, false);
    for (const auto& b : blocks) {
        if (b.start > n || b.length > n - b.start) {
            throw std::invalid_argument("block [" + std::to_string(b.start) + ", " +
                                        std::to_string(b.start + b.length) +
                                        ") lies outside the filter");
        }
        for (std::size_t i = b.start; i < b.start + b.length; ++i) {
            if (used[i]) {
                throw std::invalid_argument("blocks overlap at tap " + std::to_string(i));
            }
            used[i] = true;
        }
    }
    SystemModel model{CoefficientVector(n, 0.0), {}};
    for (const auto& b : blocks) {
        for (std::size_t i = b.start; i < b.start + b.length; ++i) {
            double v = rng.normal();
            while (v == 0.0) {
                v = rng.normal();
            }
            model.w[i] = v;
        }
    }
    return model;
}

void apply_event(CoefficientVector& w, const TrackingEvent& event, RandomStream& rng)
{
    const std::size_t n = w.size();
    if (const auto* left = std::get_if<ShiftLeft>(&event)) {
        const std::size_t t = std::min(left->taps, n);
        std::copy(w.begin() + static_cast<std::ptrdiff_t>(t), w.end(), w.begin());
        std::fill(w.end() - static_cast<std::ptrdiff_t>(t), w.end(), 0.0);
    } else if (const auto* right = std::get_if<ShiftRight>(&event)) {
        const std::size_t t = std::min(right->taps, n);
        std::copy_backward(w.begin(), w.end() - static_cast<std::ptrdiff_t>(t), w.end());
        std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(t), 0.0);
    } else {
        for (double& v : w) {
            if (v != 0.0) {
                double draw = rng.normal();
                while (draw == 0.0) {
                    draw = rng.normal();
                }
                v = draw;
            }
        }
    }
}

std::size_t support_size(std::span<const double> w)
{
    return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return v != 0.0; }));
}

void validate(const InputProcess& process)
{
    if (const auto* wg = std::get_if<WhiteGaussian>(&process)) {
        if (!(wg->variance > 0.0) || !std::isfinite(wg->variance)) {
            throw std::invalid_argument("white input variance must be finite and positive");
        }
    } else {
        const auto& ar = std::get<Ar1>(process);
        if (!(std::abs(ar.a) < 1.0)) {
            throw std::invalid_argument("AR(1) coefficient must satisfy |a| < 1");
        }
    }
}

double stationary_variance(const InputProcess& process)
{
    if (const auto* wg = std::get_if<WhiteGaussian>(&process)) {
        return wg->variance;
    }
    const auto& ar = std::get<Ar1>(process);
    return ar.normalize ? 1.0 : 1.0 / (1.0 - ar.a * ar.a);
}

InputGenerator::InputGenerator(const InputProcess& process, RandomStream rng)
    : process_(process), rng_(rng)
{
    validate(process_);
    if (const auto* wg = std::get_if<WhiteGaussian>(&process_)) {
        scale_ = std::sqrt(wg->variance);
    } else {
        const auto& ar = std::get<Ar1>(process_);
        const double raw_sd = 1.0 / std::sqrt(1.0 - ar.a * ar.a);
        state_ = raw_sd * rng_.normal();
        scale_ = ar.normalize ? std::sqrt(1.0 - ar.a * ar.a) : 1.0;
    }
}

double InputGenerator::next()
{
    if (std::holds_alternative<WhiteGaussian>(process_)) {
        return scale_ * rng_.normal();
    }
    const double a = std::get<Ar1>(process_).a;
    state_ = a * state_ + rng_.normal();
    return scale_ * state_;
}

double desired_output(std::span<const double> w, std::span<const double> x,
                      const NoiseProcess& noise, RandomStream& noise_rng)
{
    detail::require_same_size(x.size(), w.size(), "regressor");
    const double clean = detail::dot(w, x);
    if (noise.variance == 0.0) {
        return clean;
    }
    return clean + std::sqrt(noise.variance) * noise_rng.normal();
}

} // namespace rlms
