// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Bessel functions of integer and half-integer order (the orders that arise
// from spherical-harmonic reductions in dimensions 2, 3, 4), plus Gegenbauer
// polynomial recurrences.
//
// Two evaluation paths are provided:
//   * bessel_j          - the reference path: power series for small argument,
//                         finite-interval integral representations otherwise.
//   * bessel_j_fast /   - recurrence-based path (seeded forward recurrence or
//     bessel_j_batch      Miller's downward algorithm) used by the table
//                         engines; validated against bessel_j in the tests.

#ifndef WPLAB_SPECFUN_HPP
#define WPLAB_SPECFUN_HPP

#include "wplab/common.hpp"

namespace wplab {

// Order s = twice_order / 2.  Only integers and half-integers >= -1/2 occur:
// the radial symbol in R^n at angular degree l has order (n-2)/2 + l.
struct BesselOrder {
    int twice_order = 0;

    BesselOrder() = default;
    explicit BesselOrder(int twice)
        : twice_order(twice)
    {
        if (twice < -1) fail_invalid("BesselOrder: orders below -1/2 are not supported");
    }
    static BesselOrder from_integer(int s) { return BesselOrder(2 * s); }
    static BesselOrder for_dimension(int n, int l) { return BesselOrder(n - 2 + 2 * l); }

    double value() const { return 0.5 * twice_order; }
    bool is_integer() const { return twice_order % 2 == 0; }
};

// J_s(y) for y >= 0, absolute error <= 1e-10 over the lab's order range.
// Power series in the cancellation-free zone y <= max(8, 2*sqrt(s+1));
// integral representation otherwise.
double bessel_j(BesselOrder order, double y);

// Finite-interval integral representation of J_s on the doubled period
// (-2*pi, 2*pi), returned as the full complex quadrature result (the
// imaginary part must vanish; callers may assert on it).
//
// Integer s:        J_s(y) = (-i)^s/(4 pi) * Int e^{iy cos t} e^{-ist} dt.
// Half-integer s:   the same average vanishes identically -- e^{iy cos t} has
//   only integer frequencies, and Int_{-2pi}^{2pi} e^{i(m-s)t} dt = 0 whenever
//   m - s is a half-integer.  A representation that does hold replaces the
//   pure phase by a Legendre-weighted kernel: with s = k + 1/2,
//      J_s(y) = sqrt(y/(2 pi)) (-i)^k / 4 *
//               Int_{-2pi}^{2pi} e^{iy cos t} P_k(cos t) |sin t| dt,
//   which is the classical Poisson representation after the spherical
//   reduction.  By symmetry the integrand folds to 4x the (0, pi) integral,
//   where it is smooth; the quadrature uses that reduction.
complex bessel_j_doubled_interval(BesselOrder order, double y);

// Real part of the above with the |Im| <= 1e-9 contract enforced.
double bessel_j_halfint_integral(BesselOrder order, double y);

// Max residual over y_samples of the derivative identity
//   d/dy [ y^{-s} J_s(y) ] = - y^{-s} J_{s+1}(y),
// with the derivative taken by central differences (step 1e-5).
double check_bessel_recursion(BesselOrder order, const std::vector<double>& y_samples);

// Gegenbauer polynomial C_l^lambda(x) by the three-term recurrence.
double gegenbauer(int l, double lambda, double x);

// Legendre P_l = C_l^{1/2} and Chebyshev U_l = C_l^1.
double legendre_p(int l, double x);
double chebyshev_u(int l, double x);

// Fast path: identical contract to bessel_j, implemented with seeded forward
// recurrence (y well above the turning point) or Miller's downward recurrence.
double bessel_j_fast(BesselOrder order, double y);

// All orders s0 + k for k = 0..count-1 at a single argument, where
// s0 = twice_order_base/2 must be 0, 1/2 or 1.  Fills out[k] = J_{s0+k}(y).
void bessel_j_batch(int twice_order_base, int count, double y, double* out);

} // namespace wplab

#endif
