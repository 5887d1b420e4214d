// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Shared constants and small helpers used across the library.

#ifndef WPLAB_COMMON_HPP
#define WPLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wplab {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

// Surface area of the unit sphere S^{n-1} in R^n.
inline double surface_area(int n)
{
    switch (n) {
    case 2: return two_pi;             // circle
    case 3: return 4.0 * pi;           // 2-sphere
    case 4: return 2.0 * pi * pi;      // 3-sphere
    default:
        return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
    }
}

// i^l for integer l (exact, no trig roundoff).
inline complex unit_imag_pow(int l)
{
    switch (((l % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

// FNV-1a over raw bytes; used for grid/config fingerprints in reports.
inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t h = 14695981039346656037ull)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= static_cast<std::uint64_t>(p[i]);
        h *= 1099511628211ull;
    }
    return h;
}

[[noreturn]] inline void fail_invalid(const std::string& msg)
{
    throw std::invalid_argument(msg);
}

[[noreturn]] inline void fail_runtime(const std::string& msg)
{
    throw std::runtime_error(msg);
}

} // namespace wplab

#endif
