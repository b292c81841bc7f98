#pragma once

#include <cstdint>
#include <span>

#include "ranger/rqrmi.hpp"

namespace ranger::rqrmi {

struct FitConfig {
    unsigned epochs = 300;
    std::size_t batch = 256;
    double learning_rate = 0.05;
};

/// Least-squares fit of one net to samples (x in [0,1], y in index units).
/// Deterministic for a given seed. Returned parameters are exactly
/// representable as 32-bit floats.
TinyNet fit_net(std::span<const double> xs, std::span<const double> ys, const FitConfig& config, std::uint64_t seed);

/// Mean squared error of `net` over the samples.
double mse(const TinyNet& net, std::span<const double> xs, std::span<const double> ys) noexcept;

inline double to_float_precision(double v) noexcept { return static_cast<double>(static_cast<float>(v)); }

/// SplitMix64 finalizer over (a, b); used to derive per-net seeds.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace ranger::rqrmi
