// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/specfun.hpp"

#include <algorithm>

#include "wplab/quadrature.hpp"

namespace wplab {

namespace {

// Power series sum_m (-1)^m (y/2)^{s+2m} / (m! Gamma(s+m+1)).  Used only in
// the zone y <= max(8, 2 sqrt(s+1)) where the terms decay essentially
// monotonically, so cancellation costs at most a couple of digits.
double series_j(double s, double y)
{
    if (y == 0.0) return s == 0.0 ? 1.0 : 0.0;
    double term = std::exp(s * std::log(0.5 * y) - std::lgamma(s + 1.0));
    if (term == 0.0) return 0.0; // true value below double-precision underflow
    double sum = term;
    const double q = 0.25 * y * y;
    for (int m = 0; m < 600; ++m) {
        term *= -q / ((m + 1.0) * (s + m + 1.0));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

double series_threshold(double s)
{
    return std::max(8.0, 2.0 * std::sqrt(s + 1.0));
}

// Large-argument asymptotic for J_0 and J_1 (used only as recurrence seeds
// for y >= 14, where the optimally truncated error is below 1e-11).
double asymptotic_j01(int nu, double y)
{
    const double mu = 4.0 * nu * nu;
    double a = 1.0; // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k 8)
    double p = 1.0, q = 0.0;
    double prev_mag = 1.0;
    for (int k = 1; k <= 13; ++k) {
        a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        const double mag = std::abs(a) / std::pow(y, k);
        if (mag > prev_mag) break; // divergent tail: stop at the smallest term
        prev_mag = mag;
        const double term = a / std::pow(y, k);
        switch (k % 4) {
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        default: p += term; break;
        }
    }
    const double chi = y - (0.5 * nu + 0.25) * pi;
    return std::sqrt(2.0 / (pi * y)) * (p * std::cos(chi) - q * std::sin(chi));
}

double closed_j_half(double y) // J_{1/2}
{
    return std::sqrt(2.0 / (pi * y)) * std::sin(y);
}

double closed_j_3half(double y) // J_{3/2}
{
    return std::sqrt(2.0 / (pi * y)) * (std::sin(y) / y - std::cos(y));
}

// Upward recurrence J_{s+1} = (2s/y) J_s - J_{s-1}, stable for orders below
// the argument.  Fills orders frac, frac+1, ..., frac+count-1.
void forward_fill(double frac, int count, double y, double* out)
{
    double jm1, j0;
    if (frac == 0.5) {
        jm1 = closed_j_half(y);
        j0 = closed_j_3half(y);
    } else {
        jm1 = asymptotic_j01(0, y);
        j0 = asymptotic_j01(1, y);
    }
    if (count >= 1) out[0] = jm1;
    if (count >= 2) out[1] = j0;
    for (int k = 2; k < count; ++k) {
        const double s = frac + (k - 1);
        const double jp = (2.0 * s / y) * j0 - jm1;
        jm1 = j0;
        j0 = jp;
        out[k] = jp;
    }
}

// Miller's downward recurrence on the order grid frac + k.  Starts well above
// both the largest requested order and the turning point, recurses down, and
// normalizes with the even-order sum rule (integer grid) or the elementary
// closed forms at orders 1/2, 3/2 (half-integer grid).
void miller_fill(double frac, int count, double y, double* out)
{
    const double smax = frac + (count - 1);
    const double top = std::max({smax, 1.02 * y + 5.0, 1.0});
    const int start = static_cast<int>(std::ceil(top - frac)) + static_cast<int>(7.0 * std::cbrt(top)) + 30;

    std::vector<double> v(static_cast<std::size_t>(start) + 2);
    v[start + 1] = 0.0;
    v[start] = 1e-155;
    for (int j = start; j >= 1; --j) {
        const double s = frac + j;
        v[j - 1] = (2.0 * s / y) * v[j] - v[j + 1];
        if (std::abs(v[j - 1]) > 1e250) {
            for (int k = j - 1; k <= start + 1; ++k) v[k] *= 1e-250;
        }
    }

    double scale;
    if (frac == 0.5) {
        // Normalize against whichever closed form is farther from a zero.
        const double c0 = closed_j_half(y), c1 = closed_j_3half(y);
        scale = std::abs(c0) >= std::abs(c1) ? c0 / v[0] : c1 / v[1];
    } else {
        // J_0 + 2 (J_2 + J_4 + ...) = 1.
        double sum = v[0];
        for (int j = 2; j <= start; j += 2) sum += 2.0 * v[j];
        scale = 1.0 / sum;
    }
    for (int k = 0; k < count; ++k) out[k] = v[k] * scale;
}

} // namespace

double bessel_j(BesselOrder order, double y)
{
    if (!(y >= 0.0)) fail_invalid("bessel_j: argument must be finite and non-negative");
    const double s = order.value();
    if (y <= series_threshold(s)) return series_j(s, y);
    if (order.twice_order == -1) {
        // Elementary closed form for order -1/2.
        return std::sqrt(2.0 / (pi * y)) * std::cos(y);
    }
    return bessel_j_doubled_interval(order, y).real();
}

complex bessel_j_doubled_interval(BesselOrder order, double y)
{
    if (!(y >= 0.0)) fail_invalid("bessel_j_doubled_interval: argument must be non-negative");
    if (order.twice_order < 0)
        fail_invalid("bessel_j_doubled_interval: order must be a non-negative half-integer");
    const double s = order.value();

    if (order.is_integer()) {
        // The integrand is 4*pi-periodic, so the uniform (trapezoidal) rule is
        // spectrally exact once the node count clears the phase bandwidth;
        // node doubling verifies it.
        const complex front = std::conj(unit_imag_pow(static_cast<int>(s))); // (-i)^s
        int nn = 128 + 4 * (static_cast<int>(std::ceil(y)) + order.twice_order);
        complex prev = 0.0;
        for (int pass = 0; pass < 9; ++pass) {
            complex sum = 0.0;
            const double h = 4.0 * pi / nn;
            for (int j = 0; j < nn; ++j) {
                const double t = -two_pi + j * h;
                const double re = y * std::cos(t);
                sum += complex(std::cos(re), std::sin(re))
                       * complex(std::cos(s * t), -std::sin(s * t));
            }
            sum *= h * front / (4.0 * pi);
            if (pass > 0 && std::abs(sum - prev) <= 1e-12 * std::max(1.0, std::abs(sum)))
                return sum;
            prev = sum;
            nn *= 2;
        }
        fail_runtime("bessel_j_doubled_interval: node doubling failed to stabilize (integer order)");
    }

    // Half-integer order s = k + 1/2.  The pure-phase average over the doubled
    // period vanishes identically at half-integer frequencies, so the
    // Legendre-weighted kernel is used; |sin t| folds the doubled interval to
    // 4x the (0, pi) piece, where the integrand is smooth.
    const int k = (order.twice_order - 1) / 2;
    const complex front = std::sqrt(y / two_pi) * std::conj(unit_imag_pow(k)); // (-i)^k
    int panels = std::max(2, static_cast<int>(std::ceil((y + k) / 8.0)) + 2);
    complex prev = 0.0;
    for (int pass = 0; pass < 9; ++pass) {
        const QuadratureRule rule = composite_gauss(32, panels, 0.0, pi);
        complex sum = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double t = rule.nodes[j];
            const double c = std::cos(t);
            const double re = y * c;
            sum += rule.weights[j] * complex(std::cos(re), std::sin(re))
                   * legendre_p(k, c) * std::sin(t);
        }
        sum *= front;
        if (pass > 0 && std::abs(sum - prev) <= 1e-12 * std::max(1.0, std::abs(sum)))
            return sum;
        prev = sum;
        panels *= 2;
    }
    fail_runtime("bessel_j_doubled_interval: node doubling failed to stabilize (half-integer order)");
}

double bessel_j_halfint_integral(BesselOrder order, double y)
{
    const complex z = bessel_j_doubled_interval(order, y);
    if (std::abs(z.imag()) > 1e-9)
        fail_runtime("bessel_j_halfint_integral: imaginary part failed to vanish: "
                     + std::to_string(z.imag()));
    return z.real();
}

double check_bessel_recursion(BesselOrder order, const std::vector<double>& y_samples)
{
    const double s = order.value();
    const BesselOrder next(order.twice_order + 2);
    const double h = 1e-5;
    double worst = 0.0;
    for (const double y : y_samples) {
        const double gp = std::pow(y + h, -s) * bessel_j(order, y + h);
        const double gm = std::pow(y - h, -s) * bessel_j(order, y - h);
        const double lhs = (gp - gm) / (2.0 * h);
        const double rhs = -std::pow(y, -s) * bessel_j(next, y);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double gegenbauer(int l, double lambda, double x)
{
    if (l < 0) fail_invalid("gegenbauer: degree must be non-negative");
    if (!(lambda > 0.0)) fail_invalid("gegenbauer: lambda must be positive");
    if (std::abs(x) > 1.0) fail_invalid("gegenbauer: |x| must be at most 1");
    if (l == 0) return 1.0;
    double c0 = 1.0, c1 = 2.0 * lambda * x;
    for (int j = 2; j <= l; ++j) {
        const double c2 = (2.0 * (j + lambda - 1.0) * x * c1 - (j + 2.0 * lambda - 2.0) * c0) / j;
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

double legendre_p(int l, double x)
{
    if (l < 0) fail_invalid("legendre_p: degree must be non-negative");
    if (l == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= l; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double chebyshev_u(int l, double x)
{
    if (l < 0) fail_invalid("chebyshev_u: degree must be non-negative");
    if (l == 0) return 1.0;
    double u0 = 1.0, u1 = 2.0 * x;
    for (int j = 2; j <= l; ++j) {
        const double u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

void bessel_j_batch(int twice_order_base, int count, double y, double* out)
{
    if (count < 1) return;
    if (twice_order_base != 0 && twice_order_base != 1 && twice_order_base != 2)
        fail_invalid("bessel_j_batch: base order must be 0, 1/2 or 1");
    if (!(y >= 0.0)) fail_invalid("bessel_j_batch: argument must be non-negative");

    const double frac = (twice_order_base % 2 == 0) ? 0.0 : 0.5;
    const int offset = (twice_order_base == 2) ? 1 : 0;
    const int total = count + offset;
    const double smax = frac + (total - 1);

    if (y < 0.5) {
        // Tiny arguments: the series has at most a few terms per order.
        for (int k = 0; k < count; ++k)
            out[k] = series_j(0.5 * twice_order_base + k, y);
        return;
    }

    std::vector<double> buf(total);
    const double forward_floor = (frac == 0.5) ? 10.0 : 14.0;
    if (y >= std::max(1.05 * smax + 10.0, forward_floor)) {
        forward_fill(frac, total, y, buf.data());
    } else {
        miller_fill(frac, total, y, buf.data());
    }
    for (int k = 0; k < count; ++k) out[k] = buf[offset + k];
}

double bessel_j_fast(BesselOrder order, double y)
{
    if (!(y >= 0.0)) fail_invalid("bessel_j_fast: argument must be non-negative");
    const double s = order.value();
    if (y <= series_threshold(s)) return series_j(s, y);
    if (order.twice_order == -1) return std::sqrt(2.0 / (pi * y)) * std::cos(y);
    const int base = (order.twice_order % 2 == 0) ? 0 : 1;
    const int count = (order.twice_order - base) / 2 + 1;
    std::vector<double> buf(count);
    bessel_j_batch(base, count, y, buf.data());
    return buf[count - 1];
}

} // namespace wplab
