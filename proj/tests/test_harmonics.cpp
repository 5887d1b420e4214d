// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "wplab/harmonics.hpp"
#include "wplab/rng.hpp"

using namespace wplab;

namespace {

SpherePoint random_point(int n, std::uint64_t& state)
{
    // Rejection-free: Gaussian components normalized.
    SpherePoint p{};
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double u1 = oracles::test_uniform(state);
            const double u2 = oracles::test_uniform(state);
            p[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
            norm2 += p[k] * p[k];
        }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int k = 0; k < n; ++k) p[k] *= inv;
    return p;
}

SphereFunction random_function(int n, int L_max, std::uint64_t seed)
{
    SphereFunction F(n, L_max);
    for (std::size_t k = 0; k < F.coeffs.size(); ++k)
        F.coeffs[k] = complex_gauss(seed, 7, static_cast<std::uint64_t>(k));
    return F;
}

} // namespace

TEST_CASE("eigenspace dimensions and Laplacian eigenvalues")
{
    CHECK(dim_Y(3, 2) == 5);
    CHECK(dim_Y(4, 1) == 4);
    CHECK(dim_Y(2, 0) == 1);
    CHECK(dim_Y(3, 0) == 1);
    for (int l = 1; l <= 12; ++l) {
        CHECK(dim_Y(2, l) == 2);
        CHECK(dim_Y(3, l) == 2 * l + 1);
        CHECK(dim_Y(4, l) == (l + 1) * (l + 1));
    }
    CHECK(eigenvalue(3, 1) == doctest::Approx(2.0));
    CHECK(eigenvalue(4, 2) == doctest::Approx(8.0));
    CHECK(eigenvalue(2, 0) == 0.0);
    CHECK(eigenvalue(4, 0) == 0.0);
}

TEST_CASE("basis point values against polynomial oracles")
{
    // Constant mode.
    CHECK(eval_basis({2, 0, 0}, {1.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));

    // Zonal values on S^2: sqrt(2l+1) P_l(cos theta).
    const SpherePoint north{0.0, 0.0, 1.0, 0.0};
    CHECK(eval_basis({3, 1, 0}, north) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
    std::uint64_t state = 99;
    for (int l : {2, 5, 11, 20}) {
        for (int rep = 0; rep < 5; ++rep) {
            const SpherePoint p = random_point(3, state);
            const double expected = std::sqrt(2.0 * l + 1.0) * oracles::legendre_explicit(l, p[2]);
            CHECK(eval_basis({3, l, 0}, p) == doctest::Approx(expected).epsilon(1e-9));
        }
    }

    // Zonal values on S^3: Chebyshev-U of the cosine to the axis.
    for (int l : {1, 3, 8}) {
        for (int rep = 0; rep < 5; ++rep) {
            const SpherePoint p = random_point(4, state);
            CHECK(eval_basis({4, l, 0}, p)
                  == doctest::Approx(oracles::chebyshev_u_trig(l, p[0])).epsilon(1e-11));
        }
    }

    // Circle modes.
    const double t = 1.234;
    const SpherePoint c{std::cos(t), std::sin(t), 0.0, 0.0};
    CHECK(eval_basis({2, 3, 0}, c) == doctest::Approx(std::sqrt(2.0) * std::cos(3 * t)));
    CHECK(eval_basis({2, 3, 1}, c) == doctest::Approx(std::sqrt(2.0) * std::sin(3 * t)));

    // Only zonal slots exist on S^3.
    CHECK_THROWS_AS(eval_basis({4, 2, 1}, north), std::invalid_argument);
}

TEST_CASE("sum of squared basis values is constant over the sphere")
{
    std::uint64_t state = 2024;
    std::vector<SpherePoint> pts2, pts3;
    for (int k = 0; k < 100; ++k) pts2.push_back(random_point(2, state));
    for (int k = 0; k < 200; ++k) pts3.push_back(random_point(3, state));

    CHECK(addition_theorem_residual(2, 7, pts2) <= 1e-10);
    CHECK(addition_theorem_residual(3, 16, pts3) <= 1e-9);
    CHECK(addition_theorem_residual(3, 0, pts3) <= 1e-15);
    for (int l = 0; l <= 32; ++l) {
        CHECK(addition_theorem_residual(2, l, pts2) <= 1e-9);
        CHECK(addition_theorem_residual(3, l, pts3) <= 1e-9);
    }
    CHECK_THROWS_AS(addition_theorem_residual(4, 3, pts3), std::invalid_argument);
}

TEST_CASE("quadrature weights, Gram matrices and Parseval")
{
    for (int n : {2, 3, 4}) {
        const AngularQuadrature q = make_angular_quadrature(n, 24);
        double total = 0.0;
        for (double w : q.weights) {
            CHECK(w > 0.0);
            total += w;
        }
        CHECK(total == doctest::Approx(surface_area(n)).epsilon(1e-12));
    }

    // Gram matrix of all basis functions of degree <= 12 under the normalized
    // inner product.
    for (int n : {2, 3}) {
        const int L = 12;
        const AngularQuadrature q = make_angular_quadrature(n, 2 * L + 2);
        const int size = flat_size(n, L);
        std::vector<double> gram(static_cast<std::size_t>(size) * size, 0.0);
        std::vector<double> basis;
        for (std::size_t a = 0; a < q.size(); ++a) {
            eval_basis_all(n, L, q.nodes[a], default_axis(n), basis);
            const double w = q.weights[a] / surface_area(n);
            for (int r = 0; r < size; ++r)
                for (int cidx = r; cidx < size; ++cidx)
                    gram[static_cast<std::size_t>(r) * size + cidx] += w * basis[r] * basis[cidx];
        }
        double worst = 0.0;
        for (int r = 0; r < size; ++r)
            for (int cidx = r; cidx < size; ++cidx) {
                const double want = (r == cidx) ? 1.0 : 0.0;
                worst = std::max(worst,
                                 std::abs(gram[static_cast<std::size_t>(r) * size + cidx] - want));
            }
        CHECK(worst <= 1e-9);
    }

    // Zonal Gram on S^3.
    {
        const int L = 12;
        const AngularQuadrature q = make_angular_quadrature(4, 2 * L + 2);
        std::vector<double> basis;
        double worst = 0.0;
        for (int l = 0; l <= L; ++l)
            for (int k = l; k <= L; ++k) {
                double acc = 0.0;
                for (std::size_t a = 0; a < q.size(); ++a) {
                    eval_basis_all(4, L, q.nodes[a], default_axis(4), basis);
                    acc += q.weights[a] / surface_area(4) * basis[l] * basis[k];
                }
                worst = std::max(worst, std::abs(acc - (l == k ? 1.0 : 0.0)));
            }
        CHECK(worst <= 1e-9);
    }

    // Parseval: quadrature L^2 norm matches the coefficient norm.
    for (int n : {2, 3, 4}) {
        const SphereFunction F = random_function(n, 32, 5150 + n);
        const AngularQuadrature q = make_angular_quadrature(n, 66);
        double acc = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a)
            acc += q.weights[a] / surface_area(n) * std::norm(F.evaluate(q.nodes[a]));
        CHECK(std::sqrt(acc) == doctest::Approx(F.l2_norm()).epsilon(1e-8));
    }
}

TEST_CASE("fractional angular Laplacian and Sobolev norm")
{
    SphereFunction F(3, 2);
    F.at(0, 0) = complex(1.0, 0.0);
    const SphereFunction G = omega_power(F, 1.0);
    CHECK(G.l2_norm() == 0.0);

    SphereFunction H(3, 2);
    H.at(1, 1) = complex(0.5, -0.25);
    const SphereFunction H2 = omega_power(H, 2.0);
    CHECK(H2.at(1, 1) == complex(1.0, -0.5)); // eigenvalue 2 at (n,l) = (3,1)

    const SphereFunction R = random_function(3, 8, 777);
    const SphereFunction R0 = omega_power(R, 0.0);
    for (std::size_t k = 0; k < R.coeffs.size(); ++k) CHECK(R0.coeffs[k] == R.coeffs[k]);

    // Semigroup property of the coefficient scaling.
    const SphereFunction A = omega_power(omega_power(R, 0.7), 1.3);
    const SphereFunction B = omega_power(R, 2.0);
    for (std::size_t k = 0; k < A.coeffs.size(); ++k)
        CHECK(std::abs(A.coeffs[k] - B.coeffs[k]) <= 1e-14 * std::abs(B.coeffs[k]) + 1e-300);

    // Negative powers reject a nonzero mean part.
    CHECK_THROWS_AS(omega_power(F, -1.0), std::invalid_argument);
    SphereFunction M(3, 2);
    M.at(2, 3) = complex(1.0, 0.0);
    const SphereFunction Mm = omega_power(M, -2.0);
    CHECK(Mm.at(2, 3).real() == doctest::Approx(1.0 / 6.0)); // eigenvalue 6 at (3,2)

    // Sobolev norm examples.
    SphereFunction C0(3, 0);
    C0.at(0, 0) = complex(1.0, 0.0);
    for (double s : {0.5, 1.0, 2.0}) CHECK(hs_omega_norm(C0, s) == doctest::Approx(1.0));

    SphereFunction L1(3, 1);
    L1.at(1, 0) = complex(1.0, 0.0);
    CHECK(hs_omega_norm(L1, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    const SphereFunction W = random_function(2, 16, 31337);
    CHECK(hs_omega_norm(W, 0.0) == doctest::Approx(std::sqrt(2.0) * W.l2_norm()).epsilon(1e-14));
    CHECK_THROWS_AS(hs_omega_norm(W, -0.5), std::invalid_argument);
}

TEST_CASE("angular dyadic projections")
{
    SphereFunction F(3, 16);
    F.at(3, 2) = complex(1.0, 1.0);
    const SphereFunction P1 = dyadic_project(F, 1); // scale 2: theta0(3/2) = 1
    CHECK(P1.at(3, 2) == F.at(3, 2));

    SphereFunction G(3, 16);
    G.at(9, 0) = complex(1.0, 0.0);
    CHECK(dyadic_project(G, 1).l2_norm() == 0.0); // theta0(9/2) = 0

    SphereFunction C(3, 4);
    C.at(0, 0) = complex(2.0, -1.0);
    const SphereFunction CZ = dyadic_project(C, DYADIC_ZERO);
    CHECK(CZ.at(0, 0) == C.at(0, 0));
    CHECK(CZ.l2_norm() == doctest::Approx(C.l2_norm()));

    // Energy partition: the degree-0 piece plus the dyadic pieces capture each
    // degree with combined weight in [1, 3] (at most three scales see any l).
    const SphereFunction R = random_function(3, 32, 4242);
    double total = std::pow(dyadic_project(R, DYADIC_ZERO).l2_norm(), 2);
    for (int j = 0; j <= 7; ++j) total += std::pow(dyadic_project(R, j).l2_norm(), 2);
    const double e = std::pow(R.l2_norm(), 2);
    CHECK(total >= e * (1.0 - 1e-12));
    CHECK(total <= e * (3.0 + 1e-12));
}

TEST_CASE("sup over L2 ratio with dyadic normalization")
{
    const AngularQuadrature q3 = make_angular_quadrature(3, 80);

    // Constants realize ratio 1 under the normalized measure.
    SphereFunction C(3, 0);
    C.at(0, 0) = complex(0.7, 0.0);
    CHECK(bernstein_ratio(C, q3) == doctest::Approx(1.0).epsilon(1e-10));

    const double C_B = 4.0;

    SphereFunction Z(3, 4);
    Z.at(4, 0) = complex(1.0, 0.0);
    const double rz = bernstein_ratio(Z, q3);
    CHECK(rz <= C_B);
    CHECK(rz >= 0.5); // zonal modes peak at the pole: sqrt(2l+1)/l^1 here

    double recorded_max = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        // Random functions localized at degrees around N = 16.
        SphereFunction F(3, 32);
        std::uint64_t seed = 909000 + draw;
        for (int l = 9; l <= 32; ++l)
            for (int i = 0; i < basis_slots(3, l); ++i)
                F.at(l, i) = complex_gauss(seed, 11, static_cast<std::uint64_t>(l * 100 + i));
        const double r = bernstein_ratio(F, q3);
        CHECK(r <= C_B);
        recorded_max = std::max(recorded_max, r);
    }
    MESSAGE("sup/L2 ratio, max over 50 random draws at N=16 (n=3): ", recorded_max);

    SphereFunction zero(3, 4);
    CHECK_THROWS_AS(bernstein_ratio(zero, q3), std::invalid_argument);
}

TEST_CASE("coefficient records round-trip through CSV")
{
    const SphereFunction F = random_function(3, 9, 60601);
    std::stringstream buf;
    sphere_function_to_csv(buf, F);
    const SphereFunction G = sphere_function_from_csv(buf);
    CHECK(G.n == F.n);
    CHECK(G.L_max == F.L_max);
    REQUIRE(G.coeffs.size() == F.coeffs.size());
    for (std::size_t k = 0; k < F.coeffs.size(); ++k) CHECK(G.coeffs[k] == F.coeffs[k]);

    const SphereFunction Z = random_function(4, 6, 60602);
    std::stringstream buf4;
    sphere_function_to_csv(buf4, Z);
    const SphereFunction Z2 = sphere_function_from_csv(buf4);
    for (std::size_t k = 0; k < Z.coeffs.size(); ++k) CHECK(Z2.coeffs[k] == Z.coeffs[k]);

    std::stringstream empty;
    CHECK_THROWS_AS(sphere_function_from_csv(empty), std::invalid_argument);
}
