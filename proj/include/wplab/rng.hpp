// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based deterministic random numbers: every draw is a pure function
// of (seed, stream, index), so data generators are reproducible regardless of
// evaluation order or thread count.

#ifndef WPLAB_RNG_HPP
#define WPLAB_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace wplab {

// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t idx)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ idx);
}

// Uniform draw in the open interval (0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t idx)
{
    const std::uint64_t bits = counter_hash(seed, stream, idx);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Complex Gaussian with E|g|^2 = 1: radius^2 ~ Exp(1), uniform phase.
inline std::complex<double> complex_gauss(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t idx)
{
    const double u1 = uniform01(seed, stream, 2 * idx);
    const double u2 = uniform01(seed, stream, 2 * idx + 1);
    const double radius = std::sqrt(-std::log(u1));
    const double phase = 2.0 * 3.14159265358979323846 * u2;
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

} // namespace wplab

#endif
