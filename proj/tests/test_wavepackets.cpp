// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Wave-packet layer: Fourier-series localization of unit-band profiles, the
// envelope functions psi^l_m, mode reconstruction from translated packets,
// and the three-regime envelope bounds with fitted constants.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include "wplab/cutoffs.hpp"
#include "wplab/propagator.hpp"
#include "wplab/quadrature.hpp"
#include "wplab/rng.hpp"
#include "wplab/specfun.hpp"
#include "wplab/wavepackets.hpp"

#include "oracles.hpp"

using namespace wplab;

namespace {

// Direct evaluation of the truncated series  sum_k c_k e^{i (pi/2) k rho}.
complex series_eval(const PacketSeries& s, double rho)
{
    complex total(0.0, 0.0);
    for (int k = s.k_min; k <= s.k_max(); ++k)
        total += s.at(k) * std::polar(1.0, 0.5 * pi * k * rho);
    return total;
}

// Brute-force envelope oracle on a dense fixed rule (no adaptive refinement
// shared with the implementation); 512 panels resolve every (m, r) used by
// the oracle comparisons below.
complex psi_oracle(int n, int l, double m, double r)
{
    static const QuadratureRule rule = composite_gauss(24, 512, 0.25, 4.0);
    const BesselOrder order = BesselOrder::for_dimension(n, l);
    complex total(0.0, 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double rho = rule.nodes[q];
        const double amp = packet_band_bump(rho) * std::pow(rho, 0.5 * n) *
                           bessel_j(order, two_pi * r * rho);
        total += rule.weights[q] * amp * std::polar(1.0, -two_pi * m * rho);
    }
    return total;
}

RadialProfile modulated_profile(int shift)
{
    return make_profile(
        [shift](double rho) {
            return unit_band_bump(rho) * std::polar(1.0, 0.5 * pi * shift * rho);
        },
        0.25);
}

} // namespace

TEST_CASE("packet series: round trip, shift structure, Parseval, zero profile")
{
    const RadialProfile bump = make_profile(
        [](double rho) { return complex(unit_band_bump(rho), 0.0); }, 0.25);
    const PacketSeries base = to_packets(bump);

    // The truncated series reproduces the profile on (1/2, 2).  The bump's
    // Fourier coefficients decay like exp(-0.95 sqrt(k)), so the weight of
    // the terms beyond the default 512-term cutoff is ~2e-7; that truncation
    // floor, not the coefficient quadrature (exact to ~4e-13), bounds the
    // sup error here.  Doubling the cutoff removes the floor (second check).
    double worst = 0.0;
    for (int j = 0; j <= 200; ++j) {
        const double rho = 0.5 + 1.5 * j / 200.0;
        worst = std::max(worst, std::abs(series_eval(base, rho) - bump.fn(rho)));
    }
    CHECK(worst <= 5e-7);
    CHECK(base.tail <= 1e-8);

    const PacketSeries wide = to_packets(bump, 2 * packet_k_max, 1e-9);
    double worst_wide = 0.0;
    for (int j = 0; j <= 200; ++j) {
        const double rho = 0.5 + 1.5 * j / 200.0;
        worst_wide =
            std::max(worst_wide, std::abs(series_eval(wide, rho) - bump.fn(rho)));
    }
    CHECK(worst_wide <= 1e-8);

    // A pure e^{i (pi/2) 3 rho} modulation shifts the series by exactly 3
    // (compared where both trimmed windows store the coefficient).
    const PacketSeries shifted = to_packets(modulated_profile(3));
    double shift_err = 0.0;
    for (int k = std::max(shifted.k_min, base.k_min + 3);
         k <= std::min(shifted.k_max(), base.k_max() + 3); ++k)
        shift_err = std::max(shift_err, std::abs(shifted.at(k) - base.at(k - 3)));
    CHECK(shift_err <= 1e-12);
    double round_trip = 0.0;
    for (int j = 0; j <= 200; ++j) {
        const double rho = 0.5 + 1.5 * j / 200.0;
        const complex want = unit_band_bump(rho) * std::polar(1.0, 0.5 * pi * 3 * rho);
        round_trip = std::max(round_trip, std::abs(series_eval(shifted, rho) - want));
    }
    CHECK(round_trip <= 5e-7);

    // Parseval: 4 sum |c_k|^2 = Int_0^4 |c-hat|^2, against an independent rule.
    const QuadratureRule dense = composite_gauss(24, 384, 0.25, 4.0);
    double band_mass = 0.0;
    for (std::size_t q = 0; q < dense.size(); ++q)
        band_mass += dense.weights[q] * std::norm(bump.fn(dense.nodes[q]));
    CHECK(std::abs(4.0 * base.l2_mass() - band_mass) <= 1e-10 * band_mass);

    // Zero profile: all coefficients vanish.
    const RadialProfile zero =
        make_profile([](double) { return complex(0.0, 0.0); }, 0.25);
    const PacketSeries none = to_packets(zero);
    CHECK(none.l2_mass() == 0.0);
    CHECK(none.tail == 0.0);
}

TEST_CASE("packet series: support enforcement and tail honesty")
{
    // Profiles without the unit-band certificate are rejected.
    RadialProfile wide = make_profile(
        [](double rho) { return complex(packet_band_bump(rho), 0.0); }, 0.25, false);
    CHECK_THROWS_AS((void)to_packets(wide), std::invalid_argument);

    // A cutoff far too small for the profile's series must be refused, not
    // silently truncated.
    const ModeSet data = make_random_localized(3, 4, 91);
    CHECK_THROWS_AS((void)to_packets(data.entries.front().profile, 8),
                    std::invalid_argument);

    // With the standard cutoff the same profile is fine, and the recorded
    // tail honors the construction tolerance.
    const PacketSeries s = to_packets(data.entries.front().profile);
    CHECK(s.tail <= 1e-8);
    CHECK(s.k_max() <= packet_k_max);
    CHECK(s.k_min >= -packet_k_max);
}

TEST_CASE("packet coefficients: whole data set and l2 equivalence")
{
    const int n = 3;
    const ModeSet data = make_random_localized(n, 2, 20260815);
    const PacketCoefficients coeffs = to_packets(data);
    REQUIRE(coeffs.entries.size() == data.entries.size());
    CHECK(coeffs.n == n);

    // Packet mass is equivalent to the L2 mass within the fixed constants:
    // ||u(0)||^2 = area * sum Int |c-hat|^2 rho^{n-1}, and rho^{n-1} lies in
    // [2^{1-n}, 2^{n-1}] on the unit band while Int |c-hat|^2 = 4 sum |c_k|^2.
    const double l2_sq = data.l2_norm() * data.l2_norm();
    const double packet_sq = 4.0 * surface_area(n) * coeffs.l2_mass();
    CHECK(l2_sq <= std::pow(2.0, n - 1) * packet_sq * (1.0 + 1e-9));
    CHECK(l2_sq >= std::pow(2.0, 1 - n) * packet_sq * (1.0 - 1e-9));

    // Mode lookup returns the matching series and rejects unknown modes.
    const HarmonicIndex idx{n, data.entries.front().l, data.entries.front().i};
    CHECK(coeffs.series_for(idx).l2_mass() > 0.0);
    CHECK_THROWS_AS((void)coeffs.series_for(HarmonicIndex{n, 1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)coeffs.series_for(HarmonicIndex{2, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("envelope psi: oracle agreement, conjugation, trivial zeros")
{
    // Independent dense-quadrature oracle across regimes and dimensions.
    struct Probe {
        int n;
        int l;
        double m;
        double r;
    };
    const Probe probes[] = {
        {3, 0, 0.0, 0.0},  {3, 0, 0.0, 0.5},  {3, 0, 2.0, 2.2},  {3, 1, 1.25, 0.7},
        {3, 4, 3.0, 3.1},  {3, 16, 6.0, 5.0}, {2, 0, 1.0, 1.1},  {2, 3, 2.5, 2.0},
        {4, 2, 4.0, 4.25}, {4, 5, 0.5, 6.0},  {3, 8, 10.0, 9.5}, {3, 0, 12.0, 14.0},
    };
    for (const Probe& p : probes) {
        CAPTURE(p.n);
        CAPTURE(p.l);
        CAPTURE(p.m);
        CAPTURE(p.r);
        const complex got = psi(p.n, p.l, p.m, p.r);
        const complex want = psi_oracle(p.n, p.l, p.m, p.r);
        CHECK(std::abs(got - want) <= 1e-9);
    }

    // psi(0) vanishes whenever the Bessel order is positive.
    CHECK(psi(3, 1, 0.7, 0.0) == complex(0.0, 0.0));
    CHECK(psi(3, 1, -41.0, 0.0) == complex(0.0, 0.0));
    CHECK(psi(4, 0, 2.0, 0.0) == complex(0.0, 0.0));
    CHECK(psi(3, 0, 5.0, 0.0) == complex(0.0, 0.0)); // order 1/2 in R^3
    CHECK(std::abs(psi(2, 0, 0.0, 0.0)) > 0.1);      // order 0 does not vanish

    // Conjugation symmetry psi^l_{-m} = conj(psi^l_m).
    for (const Probe& p : probes) {
        const complex plus = psi(p.n, p.l, p.m, p.r);
        const complex minus = psi(p.n, p.l, -p.m, p.r);
        CHECK(std::abs(minus - std::conj(plus)) <= 1e-10);
    }

    // Far-field decay: by r = 20 the radial envelope has fallen at least a
    // thousandfold from its peak.
    double peak = 0.0;
    for (int j = 0; j <= 40; ++j)
        peak = std::max(peak, std::abs(psi(3, 0, 0.0, 0.05 * j)));
    CHECK(peak > 0.1);
    CHECK(std::abs(psi(3, 0, 0.0, 20.0)) <= 1e-3 * peak);

    CHECK_THROWS_AS((void)psi(5, 0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)psi(3, -1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)psi(3, 0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("reconstruction identity: packet sums reproduce evolved modes")
{
    // The module's master correctness test: the translated-packet sum agrees
    // with the direct Hankel evolution at random space-time points.
    const int n = 3;
    std::uint64_t state = 77001;
    auto uni = [&state] { return oracles::test_uniform(state); };

    for (int l : {0, 4, 16}) {
        CAPTURE(l);
        RadialProfile profile = make_profile(
            [l](double rho) {
                return unit_band_bump(rho) *
                       complex(std::cos(1.7 * rho + 0.3 * l), std::sin(2.2 * rho - 0.1 * l));
            },
            0.2);
        const PacketSeries series = to_packets(profile);
        const HarmonicIndex idx{n, l, 0};

        // Gather oracle values first to set the comparison scale.
        std::vector<double> ts;
        std::vector<double> rs;
        std::vector<complex> want;
        double peak = 0.0;
        for (int trial = 0; trial < 17; ++trial) {
            // Mix of near-cone points (where the mode lives) and bulk points.
            const double r = 0.4 + 11.0 * uni();
            double t = (trial % 3 == 0) ? -8.0 + 16.0 * uni()
                                        : (uni() < 0.5 ? -1.0 : 1.0) * (r - 2.0 + 4.0 * uni());
            ts.push_back(t);
            rs.push_back(r);
            want.push_back(hankel_mode(idx, profile, t, r));
            peak = std::max(peak, std::abs(want.back()));
        }
        REQUIRE(peak > 1e-3);

        for (std::size_t p = 0; p < ts.size(); ++p) {
            CAPTURE(ts[p]);
            CAPTURE(rs[p]);
            const complex got = reconstruct_mode(n, l, series, ts[p], rs[p]);
            const double rel =
                std::abs(got - want[p]) / std::max(std::abs(want[p]), 1e-2 * peak);
            CHECK(rel <= 1e-6);
        }
    }
}

TEST_CASE("reconstruction: zero series, mode routing, argument guards")
{
    const RadialProfile zero =
        make_profile([](double) { return complex(0.0, 0.0); }, 0.25);
    const PacketSeries none = to_packets(zero);
    CHECK(reconstruct_mode(3, 2, none, 1.5, 2.5) == complex(0.0, 0.0));

    // The coefficient-set overload routes by harmonic index.
    const ModeSet data = make_random_localized(3, 2, 5);
    const PacketCoefficients coeffs = to_packets(data);
    const ModeEntry& e = data.entries.back();
    const HarmonicIndex idx{3, e.l, e.i};
    const complex via_set = reconstruct_mode(coeffs, idx, 0.75, 1.5);
    const complex direct = reconstruct_mode(3, e.l, coeffs.series_for(idx), 0.75, 1.5);
    CHECK(via_set == direct);
    CHECK(std::abs(via_set - hankel_mode(idx, e.profile, 0.75, 1.5)) <=
          1e-6 * (1.0 + std::abs(via_set)));

    CHECK_THROWS_AS((void)reconstruct_mode(3, 0, none, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)reconstruct_mode(5, 0, none, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)reconstruct_mode(3, -1, none, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("energy transport: packet mass of half-wave data is conserved in form")
{
    // Orthogonality bookkeeping: the packet mass of a data set equals the sum
    // of its per-mode series masses and matches the Plancherel mass within
    // the band's fixed equivalence constants, independent of the seed.
    for (std::uint64_t seed : {11u, 12u}) {
        const ModeSet data = make_random_localized(2, 2, seed);
        const PacketCoefficients coeffs = to_packets(data);
        double per_mode = 0.0;
        for (const auto& e : coeffs.entries) per_mode += e.series.l2_mass();
        CHECK(per_mode == coeffs.l2_mass());
        const double l2_sq = data.l2_norm() * data.l2_norm();
        const double packet_sq = 4.0 * surface_area(2) * coeffs.l2_mass();
        CHECK(l2_sq <= 2.0 * packet_sq * (1.0 + 1e-9));
        CHECK(l2_sq >= 0.5 * packet_sq * (1.0 - 1e-9));
    }
}

TEST_CASE("envelope bounds: regime selection and shape formulas")
{
    // Regime boundaries exactly as specified.
    CHECK(psi_regime(7.0, 0.99) == PsiRegime::origin);
    CHECK(psi_regime(7.0, 1.0) == PsiRegime::cone);
    CHECK(psi_regime(40.0, 10.0) == PsiRegime::cone);
    CHECK(psi_regime(40.0, 41.0) == PsiRegime::cone);
    CHECK(psi_regime(40.0, 41.0001) == PsiRegime::beyond_cone);
    CHECK(psi_regime(-40.0, 41.0001) == PsiRegime::beyond_cone);
    CHECK(psi_regime(0.0, 1.5) == PsiRegime::beyond_cone);

    // Origin shape r^{(n-2)/2} (1+|m|)^{-N1} (1+l)^{-N2}.
    CHECK(psi_bound_shape(3, 2, -4.0, 0.25, 1, 2) ==
          doctest::Approx(0.5 / 5.0 / 9.0).epsilon(1e-12));
    // Cone shape (1+r+|m|)^{-1/2} (1+|r-|m||)^{-N1} (sqrt(r)/(1+l))^{N2}.
    CHECK(psi_bound_shape(3, 8, 40.0, 10.0, 2, 2) ==
          doctest::Approx(std::pow(51.0, -0.5) * std::pow(31.0, -2.0) * (10.0 / 81.0))
              .epsilon(1e-12));
    // Beyond-cone shape with the min_pm balance picking the + branch for
    // l < sqrt(r^2 - m^2) and the - branch above it.
    {
        const double d = std::sqrt(100.0 * 100.0 - 40.0 * 40.0);
        const double want =
            (std::pow(61.0, -2.0) + std::pow(5.0 / d, 2.0)) / d;
        CHECK(psi_bound_shape(3, 5, 40.0, 100.0, 2, 2) ==
              doctest::Approx(want).epsilon(1e-12));
        const double want_minus =
            (std::pow(61.0, -2.0) + std::pow(200.0 / d, -2.0)) / d;
        CHECK(psi_bound_shape(3, 200, 40.0, 100.0, 2, 2) ==
              doctest::Approx(want_minus).epsilon(1e-12));
    }
    // Degenerate orders: N2 = 0 makes the balance term 1; l = 0 kills it.
    CHECK(psi_bound_shape(3, 0, 0.0, 2.0, 0, 0) == doctest::Approx(1.0)); // (1 + 1)/2
    CHECK(psi_bound_shape(3, 0, 0.0, 2.0, 1, 2) ==
          doctest::Approx((1.0 / 3.0) / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)psi_bound_shape(3, 0, 0.0, 1.0, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)psi_bound_shape(3, 0, 0.0, 1.0, 0, -1), std::invalid_argument);
}

TEST_CASE("fitted constants: envelope holds, stability, table round trip")
{
    // Reduced scan grid (the full contract grid runs in the acceptance
    // suite); seam machinery identical to the default grid.
    auto reduced_grid = [](int refine) {
        ScanGrid g;
        g.degrees = {0, 1, 4, 16};
        g.translates.push_back(0.0);
        for (int j = 0; j <= 12 * refine; ++j)
            g.translates.push_back(std::exp2(-1.0 + static_cast<double>(j) / (2.0 * refine)));
        g.radii.push_back(0.0);
        for (int j = 0; j <= 18 * refine; ++j)
            g.radii.push_back(std::exp2(-3.0 + static_cast<double>(j) / (2.0 * refine)));
        for (int j = 0; j <= 5 * refine; ++j)
            g.seam_offsets.push_back(std::exp2(1.0 - static_cast<double>(j) / refine));
        g.r_cap = 72.0;
        return g;
    };

    const ScanGrid grid = reduced_grid(1);
    const ConstantsTable table = fit_constants(3, 2, 2, grid);
    CHECK(table.grid_hash == grid.hash());
    for (int reg = 0; reg < 3; ++reg) {
        CAPTURE(reg);
        CHECK(table.C[reg] > 0.0);
        CHECK(std::isfinite(table.C[reg]));
    }

    // The fitted bound holds at off-grid spot checks (non-vacuous: the
    // points below are not grid members).
    struct Spot {
        int l;
        double m;
        double r;
    };
    for (const Spot& s : {Spot{1, 2.3, 0.77}, Spot{8, 40.0, 10.0}, Spot{3, 5.1, 9.7},
                          Spot{16, 3.3, 21.0}, Spot{0, 17.2, 16.6}}) {
        CAPTURE(s.l);
        CAPTURE(s.m);
        CAPTURE(s.r);
        const PsiBound b = asymptotic_bound(3, s.l, s.m, s.r, 2, 2, table);
        CHECK(std::abs(psi(3, s.l, s.m, s.r)) <= 1.05 * b.value);
    }
    CHECK(asymptotic_bound(3, 8, 40.0, 10.0, 2, 2, table).regime == PsiRegime::cone);
    CHECK(asymptotic_bound(3, 8, 40.0, 100.0, 2, 2, table).regime ==
          PsiRegime::beyond_cone);
    CHECK(asymptotic_bound(3, 8, 40.0, 0.5, 2, 2, table).regime == PsiRegime::origin);
    CHECK_THROWS_AS((void)asymptotic_bound(3, 0, 0.0, 1.0, 1, 2, table),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)asymptotic_bound(2, 0, 0.0, 1.0, 2, 2, table),
                    std::invalid_argument);

    // Stability under grid refinement x2 (the fitted constants may only
    // move by 10%) and determinism across thread counts.
    const ConstantsTable fine = fit_constants(3, 2, 2, reduced_grid(2));
    for (int reg = 0; reg < 3; ++reg) {
        CAPTURE(reg);
        CHECK(fine.C[reg] >= table.C[reg] * (1.0 - 1e-12)); // refinement adds points
        CHECK(fine.C[reg] <= 1.10 * table.C[reg]);
    }
    const ConstantsTable threaded = fit_constants(3, 2, 2, grid, 3);
    for (int reg = 0; reg < 3; ++reg) CHECK(threaded.C[reg] == table.C[reg]);

    // Monotonicity consistency: on any grid point set, the N1 = 1 constant
    // is bounded by the N1 = 2 constant times the largest seam weight.
    const ConstantsTable lower = fit_constants(3, 1, 2, grid);
    double max_weight = 0.0;
    for (double m : grid.translates)
        for (double r : grid.radii_for(0, m))
            max_weight = std::max(max_weight, 1.0 + std::fabs(r - std::fabs(m)));
    for (int reg = 0; reg < 3; ++reg) CHECK(lower.C[reg] <= max_weight * table.C[reg]);

    // CSV round trip.
    std::ostringstream out;
    constants_table_to_csv(out, table);
    std::istringstream in(out.str());
    const auto tables = constants_tables_from_csv(in);
    REQUIRE(tables.size() == 1);
    CHECK(tables[0].n == table.n);
    CHECK(tables[0].N1 == table.N1);
    CHECK(tables[0].N2 == table.N2);
    CHECK(tables[0].grid_hash == table.grid_hash);
    for (int reg = 0; reg < 3; ++reg) CHECK(tables[0].C[reg] == table.C[reg]);
}

TEST_CASE("translation decay: constants do not grow when the grid extends in m")
{
    // Fixed (N1, N2) = (3, 2): extending the translate range must not push
    // the fitted constants up, confirming genuine decay in m.
    ScanGrid base;
    base.degrees = {0, 2, 6};
    base.translates = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    base.radii = {0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0};
    base.seam_offsets = {1.0, 0.25};
    base.r_cap = 48.0;

    ScanGrid extended = base;
    extended.translates.push_back(16.0);
    extended.translates.push_back(24.0);
    extended.translates.push_back(32.0);

    const ConstantsTable small = fit_constants(3, 3, 2, base);
    const ConstantsTable wide = fit_constants(3, 3, 2, extended);
    for (int reg = 0; reg < 3; ++reg) {
        CAPTURE(reg);
        CHECK(wide.C[reg] <= small.C[reg] * 1.02);
    }
}

TEST_CASE("envelope table: lattice agreement, window, reconstruction, threads")
{
    const int n = 3;
    const PsiTable table(n, 6, 4.0, 3.0);
    CHECK(table.n() == n);
    CHECK(table.l_max() == 6);
    CHECK(table.r_max() == doctest::Approx(4.0));
    CHECK(table.margin() == 3.0);

    // Table entries match the adaptive envelope on the lattice.
    struct Cell {
        int l;
        int j;
        int s;
    };
    for (const Cell& c : {Cell{0, 0, 16}, Cell{0, 4, 16}, Cell{2, -5, 8}, Cell{3, 13, 48},
                          Cell{6, 20, 64}, Cell{1, 3, 1}, Cell{4, -12, 0}}) {
        CAPTURE(c.l);
        CAPTURE(c.j);
        CAPTURE(c.s);
        const complex got = table.value(c.l, c.j, c.s);
        const complex want = psi(n, c.l, 0.25 * c.j, 0.0625 * c.s);
        CHECK(std::abs(got - want) <= 1e-8);
    }

    // Outside the moving window the table reports exact zeros, and the true
    // envelope there is already negligible at this margin.
    CHECK(table.value(0, 4 * 7, 16) == complex(0.0, 0.0)); // m - r = 6 > margin
    CHECK(std::abs(psi(n, 0, 7.0, 1.0)) <= 2e-3);
    CHECK_THROWS_AS((void)table.value(7, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)table.value(0, 0, 65), std::invalid_argument);

    // Thread-count independence of the fill (bitwise).
    const PsiTable threaded(n, 6, 4.0, 3.0, 3);
    double diff = 0.0;
    for (int s = 0; s <= 64; s += 8)
        for (int j = -12; j <= 28; ++j)
            diff = std::max(diff, std::abs(table.value(3, j, s) - threaded.value(3, j, s)));
    CHECK(diff == 0.0);
}

TEST_CASE("envelope table: cached reconstruction tracks the direct evolution")
{
    // A wider-margin table reconstructs evolved modes on the lattice; the
    // window truncation is the only extra error source versus the direct
    // packet sum, and stays within the scan engine's tolerance.
    const int n = 3;
    const PsiTable table(n, 5, 8.0, 8.0);
    const ModeSet data = make_random_localized(n, 2, 31415);
    const PacketCoefficients coeffs = to_packets(data);

    double peak = 0.0;
    struct Point {
        int tq;
        int s;
    };
    const Point points[] = {{2, 16}, {6, 32}, {14, 48}, {-9, 24}, {20, 128}, {0, 80}};
    for (const ModeEntry& e : data.entries) {
        const HarmonicIndex idx{n, e.l, e.i};
        for (const Point& p : points)
            peak = std::max(peak,
                            std::abs(hankel_mode(idx, e.profile, 0.25 * p.tq, 0.0625 * p.s)));
    }
    REQUIRE(peak > 1e-3);

    for (const ModeEntry& e : data.entries) {
        const HarmonicIndex idx{n, e.l, e.i};
        const PacketSeries& series = coeffs.series_for(idx);
        for (const Point& p : points) {
            CAPTURE(e.l);
            CAPTURE(e.i);
            CAPTURE(p.tq);
            CAPTURE(p.s);
            const complex got = table.reconstruct(series, e.l, p.tq, p.s);
            const complex want = hankel_mode(idx, e.profile, 0.25 * p.tq, 0.0625 * p.s);
            CHECK(std::abs(got - want) <= 2e-5 * std::max(std::abs(want), 1e-2 * peak) +
                                              1e-7 * peak);
        }
    }

    CHECK_THROWS_AS((void)table.reconstruct(coeffs.entries.front().series, 9, 0, 16),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)table.reconstruct(coeffs.entries.front().series, 0, 0, 0),
                    std::invalid_argument);
}
