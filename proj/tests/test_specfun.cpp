// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wplab/specfun.hpp"

using namespace wplab;

TEST_CASE("bessel_j basic values and input validation")
{
    CHECK(bessel_j(BesselOrder::from_integer(0), 0.0) == doctest::Approx(1.0));
    CHECK(std::abs(bessel_j(BesselOrder(1), pi)) < 1e-10); // J_{1/2}(pi) = 0
    CHECK_THROWS_AS(bessel_j(BesselOrder::from_integer(0), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(BesselOrder(-2), std::invalid_argument);
}

TEST_CASE("bessel_j agrees with the extended-precision series oracle")
{
    // Grid covering both the series branch and the integral-representation
    // branch, integer and half-integer orders.  The extended-precision series
    // oracle itself cancels ~e^y digits, so it is trusted tightly only up to
    // y = 20 and loosely at y = 26.
    double worst = 0.0, worst_far = 0.0;
    for (int twice = -1; twice <= 21; ++twice) {
        for (double y : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 10.0, 13.0, 17.0, 20.0}) {
            const double got = bessel_j(BesselOrder(twice), y);
            const double ref = oracles::bessel_series(0.5 * twice, y);
            worst = std::max(worst, std::abs(got - ref));
        }
        worst_far = std::max(worst_far, std::abs(bessel_j(BesselOrder(twice), 26.0)
                                                 - oracles::bessel_series(0.5 * twice, 26.0)));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_far < 5e-9);
}

TEST_CASE("half-integer closed forms")
{
    for (double y : {0.3, 1.7, 6.0, 12.5, 40.0}) {
        CHECK(bessel_j(BesselOrder(1), y)
              == doctest::Approx(std::sqrt(2.0 / (pi * y)) * std::sin(y)).epsilon(1e-10));
        CHECK(bessel_j(BesselOrder(3), y)
              == doctest::Approx(std::sqrt(2.0 / (pi * y)) * (std::sin(y) / y - std::cos(y)))
                     .epsilon(1e-9));
        CHECK(bessel_j(BesselOrder(-1), y)
              == doctest::Approx(std::sqrt(2.0 / (pi * y)) * std::cos(y)).epsilon(1e-10));
    }
}

TEST_CASE("doubled-interval representation agrees with bessel_j")
{
    // Cross-representation agreement over the acceptance range s <= 21/2,
    // y in {0.1, 1, 5, 10, 20}, both integer and half-integer orders.
    double worst = 0.0, worst_im = 0.0;
    for (int twice = 0; twice <= 21; ++twice) {
        for (double y : {0.1, 1.0, 5.0, 10.0, 20.0}) {
            const complex z = bessel_j_doubled_interval(BesselOrder(twice), y);
            worst = std::max(worst, std::abs(z.real() - bessel_j(BesselOrder(twice), y)));
            worst_im = std::max(worst_im, std::abs(z.imag()));
        }
    }
    CHECK(worst < 1e-9);
    CHECK(worst_im < 1e-9);

    CHECK(bessel_j_halfint_integral(BesselOrder::from_integer(0), 0.0) == doctest::Approx(1.0));
    CHECK(bessel_j_halfint_integral(BesselOrder::from_integer(1), 2.0)
          == doctest::Approx(bessel_j(BesselOrder::from_integer(1), 2.0)).epsilon(1e-9));
    CHECK(bessel_j_halfint_integral(BesselOrder(5), 7.0)
          == doctest::Approx(bessel_j(BesselOrder(5), 7.0)).epsilon(1e-9));
}

TEST_CASE("derivative recursion residual")
{
    CHECK(check_bessel_recursion(BesselOrder::from_integer(0), {1.0, 2.0, 5.0}) < 1e-6);
    CHECK(check_bessel_recursion(BesselOrder(1), {pi}) < 1e-6);
    CHECK(check_bessel_recursion(BesselOrder(4), {0.5, 3.0, 11.0, 60.0}) < 1e-6);
    CHECK(check_bessel_recursion(BesselOrder(0), {}) == 0.0);
}

TEST_CASE("small-argument law |J_s(y)| <= C y^s")
{
    for (int twice = 0; twice <= 20; twice += 2) {
        const double s = 0.5 * twice;
        double worst = 0.0;
        for (double y = 0.05; y <= 1.0; y += 0.05)
            worst = std::max(worst, std::abs(bessel_j(BesselOrder(twice), y)) / std::pow(y, s));
        CHECK(worst < 1.1); // (y/2)^s / Gamma(s+1) <= y^s
    }
}

TEST_CASE("gegenbauer recurrence against explicit coefficient oracles")
{
    CHECK(gegenbauer(0, 0.7, 0.3) == 1.0);
    CHECK(gegenbauer(1, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(gegenbauer(5, 0.5, 0.3) == doctest::Approx(oracles::legendre_explicit(5, 0.3)).epsilon(1e-12));
    CHECK_THROWS_AS(gegenbauer(3, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(gegenbauer(3, -1.0, 0.5), std::invalid_argument);

    // Moderate degree: explicit coefficient oracle (independent algorithm).
    std::uint64_t state = 12345;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int l = static_cast<int>(oracles::test_uniform(state) * 14);
        const double lambda = 0.25 + 2.0 * oracles::test_uniform(state);
        const double x = 2.0 * oracles::test_uniform(state) - 1.0;
        const double got = gegenbauer(l, lambda, x);
        const double ref = oracles::gegenbauer_explicit(l, lambda, x);
        worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
    }
    CHECK(worst < 1e-11);

    // High degree: extended-precision recurrence (precision cross-check) up to
    // l = 256 at relative 1e-12.  Near polynomial zeros pointwise relative
    // error is meaningless, so the scale is the local envelope
    // max(|C_l|, |C_{l-1}|).
    double worst_hi = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const int l = 1 + static_cast<int>(oracles::test_uniform(state) * 256);
        const double lambda = 0.25 + 2.0 * oracles::test_uniform(state);
        const double x = 2.0 * oracles::test_uniform(state) - 1.0;
        const double got = gegenbauer(l, lambda, x);
        const double ref = oracles::gegenbauer_ld_recurrence(l, lambda, x);
        const double scale = std::max({1e-300, std::abs(ref),
                                       std::abs(oracles::gegenbauer_ld_recurrence(l - 1, lambda, x))});
        worst_hi = std::max(worst_hi, std::abs(got - ref) / scale);
    }
    CHECK(worst_hi < 1e-12);

    // Three-term recurrence self-consistency at 1000 random (l, lambda, x):
    // l*C_l - 2(l+lambda-1)x*C_{l-1} + (l+2lambda-2)*C_{l-2} = 0.
    double worst_resid = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int l = 2 + static_cast<int>(oracles::test_uniform(state) * 255);
        const double lambda = 0.25 + 2.0 * oracles::test_uniform(state);
        const double x = 2.0 * oracles::test_uniform(state) - 1.0;
        const double cl = gegenbauer(l, lambda, x);
        const double cl1 = gegenbauer(l - 1, lambda, x);
        const double cl2 = gegenbauer(l - 2, lambda, x);
        const double resid = l * cl - 2.0 * (l + lambda - 1.0) * x * cl1
                             + (l + 2.0 * lambda - 2.0) * cl2;
        const double scale = std::max({1.0, std::abs(cl), std::abs(cl1), std::abs(cl2)});
        worst_resid = std::max(worst_resid, std::abs(resid) / scale);
    }
    CHECK(worst_resid < 1e-11);

    // Relative accuracy at high degree against the trigonometric closed form
    // for Chebyshev-U (lambda = 1); the closed form itself carries ~l*eps
    // phase error, hence the 1e-11 gate.
    for (int l : {64, 128, 256}) {
        for (double x : {-0.83, -0.21, 0.4, 0.97}) {
            const double got = chebyshev_u(l, x);
            const double ref = oracles::chebyshev_u_trig(l, x);
            CHECK(got == doctest::Approx(ref).epsilon(1e-11));
        }
    }

    for (double x : {-0.9, 0.0, 0.55})
        CHECK(legendre_p(7, x) == doctest::Approx(oracles::legendre_explicit(7, x)).epsilon(1e-12));
}

TEST_CASE("fast path and batch agree with the reference path")
{
    double worst = 0.0;
    for (int twice = 0; twice <= 131; ++twice) {
        for (double y : {0.05, 0.7, 3.0, 9.0, 15.0, 24.0, 41.0, 65.0, 97.0, 160.0, 310.0, 900.0}) {
            const double fast = bessel_j_fast(BesselOrder(twice), y);
            const double ref = bessel_j(BesselOrder(twice), y);
            worst = std::max(worst, std::abs(fast - ref));
        }
    }
    CHECK(worst < 2e-9);

    for (int base : {0, 1, 2}) {
        for (double y : {0.2, 4.0, 18.0, 73.0, 420.0}) {
            std::vector<double> out(80);
            bessel_j_batch(base, 80, y, out.data());
            for (int k : {0, 1, 7, 31, 79}) {
                const double ref = bessel_j(BesselOrder(base + 2 * k), y);
                CHECK(std::abs(out[k] - ref) < 2e-9);
            }
        }
    }
}
