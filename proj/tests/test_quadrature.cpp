// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wplab/cutoffs.hpp"
#include "wplab/quadrature.hpp"

using namespace wplab;

TEST_CASE("gauss-legendre nodes are symmetric and weights sum to the length")
{
    for (int n : {2, 5, 16, 32, 64}) {
        const QuadratureRule r = gauss_legendre(n);
        double wsum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            wsum += r.weights[i];
            CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.size() - 1 - i]).epsilon(1e-14));
            CHECK(r.weights[i] > 0.0);
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("gauss-legendre integrates monomials to machine precision")
{
    const QuadratureRule r = gauss_legendre(12);
    // Exact for degree <= 2n-1 = 23.
    for (int p : {0, 2, 8, 20, 22}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            sum += r.weights[i] * std::pow(r.nodes[i], p);
        CHECK(sum == doctest::Approx(2.0 / (p + 1)).epsilon(1e-13));
    }
    // And not exact at degree 24 (sanity that the exactness claim is sharp).
    double sum24 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        sum24 += r.weights[i] * std::pow(r.nodes[i], 24);
    CHECK(std::abs(sum24 - 2.0 / 25.0) > 1e-12);
}

TEST_CASE("mapped and composite rules cover (a,b)")
{
    const QuadratureRule m = gauss_legendre(16, 0.25, 4.0);
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    CHECK(wsum == doctest::Approx(3.75).epsilon(1e-14));
    CHECK(m.a == 0.25);
    CHECK(m.b == 4.0);

    const QuadratureRule c = composite_gauss(8, 7, -1.0, 2.5);
    CHECK(c.size() == 56);
    double csum = 0.0, xint = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        csum += c.weights[i];
        xint += c.weights[i] * c.nodes[i];
    }
    CHECK(csum == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(xint == doctest::Approx(0.5 * (2.5 * 2.5 - 1.0)).epsilon(1e-13));
}

TEST_CASE("oscillatory integral: constant amplitude cases")
{
    const QuadratureRule base = gauss_legendre(32, 0.0, 1.0);
    auto one = [](double) { return complex(1.0, 0.0); };

    // Zero frequency integrates the amplitude itself.
    complex v0 = oscillatory_integrate(one, 0.0, base);
    CHECK(std::abs(v0 - complex(1.0, 0.0)) < 1e-14);

    // A full period integrates to zero.
    complex v1 = oscillatory_integrate(one, 1.0, base);
    CHECK(std::abs(v1) < 1e-12);

    // Closed form for a non-integer frequency.
    const double f = 0.7;
    complex expected = (std::exp(complex(0.0, two_pi * f)) - 1.0) / complex(0.0, two_pi * f);
    complex v2 = oscillatory_integrate(one, f, base);
    CHECK(std::abs(v2 - expected) < 1e-12);
}

TEST_CASE("oscillatory integral: smooth bump is stable under node doubling")
{
    const QuadratureRule base = gauss_legendre(32, 0.25, 4.0);
    auto amp = [](double rho) { return complex(packet_band_bump(rho), 0.0); };
    const double freq = 13.7;

    const complex a = oscillatory_integrate(amp, freq, base, 1e-10);
    const complex b = oscillatory_integrate(amp, freq, base, 1e-13);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));

    // Doubling the requested base resolution reproduces the same value.
    const QuadratureRule dense = composite_gauss(32, 8, 0.25, 4.0);
    const complex c = oscillatory_integrate(amp, freq, dense, 1e-13);
    CHECK(std::abs(c - b) <= 1e-10 * std::max(1.0, std::abs(b)));
}

TEST_CASE("oscillatory integral: high frequency against a Gaussian-like bump")
{
    // Against an analytic check: integral of ramped bump times e^{2 pi i f x}
    // computed with a very dense direct rule.
    const QuadratureRule base = gauss_legendre(32, 0.5, 2.0);
    auto amp = [](double x) { return complex(unit_band_bump(x), 0.0); };
    const double f = 41.3;
    const complex v = oscillatory_integrate(amp, f, base, 1e-12);

    const QuadratureRule dense = composite_gauss(32, 400, 0.5, 2.0);
    complex direct = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double x = dense.nodes[i];
        direct += dense.weights[i] * unit_band_bump(x)
                  * complex(std::cos(two_pi * f * x), std::sin(two_pi * f * x));
    }
    CHECK(std::abs(v - direct) < 1e-12);
}

TEST_CASE("cutoff family: supports, plateaus and smooth joins")
{
    CHECK(theta0(0.5) == 0.0);
    CHECK(theta0(4.0) == 0.0);
    CHECK(theta0(1.0) == 1.0);
    CHECK(theta0(1.5) == 1.0);
    CHECK(theta0(2.0) == 1.0);
    CHECK(theta0(0.75) > 0.0);
    CHECK(theta0(0.75) < 1.0);
    CHECK(theta0(3.0) > 0.0);
    CHECK(theta0(3.0) < 1.0);

    CHECK(unit_band_bump(0.5) == 0.0);
    CHECK(unit_band_bump(2.0) == 0.0);
    CHECK(unit_band_bump(1.0) == 1.0);
    CHECK(packet_band_bump(0.5) == 1.0);
    CHECK(packet_band_bump(2.0) == 1.0);
    CHECK(packet_band_bump(0.25) == 0.0);
    CHECK(packet_band_bump(4.0) == 0.0);

    // The ramp joins its plateaus flat to high order: finite differences of
    // several orders vanish at both joins much faster than h^ord.
    const double h = 5e-3;
    for (double join : {0.0, 1.0}) {
        for (int ord = 1; ord <= 4; ++ord) {
            double acc = 0.0;
            double binom = 1.0;
            for (int k = 0; k <= ord; ++k) {
                acc += ((ord - k) % 2 == 0 ? 1.0 : -1.0) * binom
                       * smooth_ramp(join + (0.5 * ord - k) * h);
                binom = binom * (ord - k) / (k + 1.0);
            }
            CHECK(std::abs(acc / std::pow(h, ord)) < 1e-3);
        }
    }

    // The ramp density is even about 1/2, so ramp(u) + ramp(1-u) = 1; this is
    // a sharp consistency probe of the cumulative table.
    for (double u : {0.05, 0.21, 0.5, 0.68, 0.93})
        CHECK(smooth_ramp(u) + smooth_ramp(1.0 - u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(smooth_ramp(0.5) == doctest::Approx(0.5).epsilon(1e-14));

    // Finite-difference derivative of the ramp matches the (analytically
    // known) normalized density.
    double norm = 0.0;
    {
        // Trapezoid on a fine grid is plenty to cross-check the density mass.
        const int m = 20000;
        for (int j = 0; j <= m; ++j) {
            const double w = (j == 0 || j == m) ? 0.5 : 1.0;
            norm += w * model_bump(2.0 * (static_cast<double>(j) / m) - 1.0);
        }
        norm /= m;
    }
    for (double u : {0.2, 0.47, 0.81}) {
        const double fd = (smooth_ramp(u - 2e-4) - 8.0 * smooth_ramp(u - 1e-4)
                           + 8.0 * smooth_ramp(u + 1e-4) - smooth_ramp(u + 2e-4))
                          / (12.0 * 1e-4);
        CHECK(fd == doctest::Approx(model_bump(2.0 * u - 1.0) / norm).epsilon(1e-7));
    }
}
