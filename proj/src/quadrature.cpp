// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/quadrature.hpp"

#include <bit>
#include <map>
#include <mutex>

namespace wplab {

namespace {

QuadratureRule compute_gauss_legendre(int n)
{
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.a = -1.0;
    rule.b = 1.0;
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Tricomi-style initial guess, then Newton on P_n.
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[k] = -x; // ascending order: leftmost root first
        rule.nodes[n - 1 - k] = x;
        rule.weights[k] = w;
        rule.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

const QuadratureRule& cached_gauss_legendre(int n)
{
    static std::mutex mtx;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

} // namespace

QuadratureRule gauss_legendre(int n)
{
    if (n < 1) fail_invalid("gauss_legendre: node count must be positive");
    return cached_gauss_legendre(n);
}

QuadratureRule gauss_legendre(int n, double a, double b)
{
    const QuadratureRule& base = gauss_legendre(n);
    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(base.size());
    rule.weights.resize(base.size());
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    for (std::size_t i = 0; i < base.size(); ++i) {
        rule.nodes[i] = mid + rad * base.nodes[i];
        rule.weights[i] = rad * base.weights[i];
    }
    return rule;
}

QuadratureRule composite_gauss(int nodes_per_panel, int panels, double a, double b)
{
    if (panels < 1) fail_invalid("composite_gauss: panel count must be positive");
    const QuadratureRule& base = gauss_legendre(nodes_per_panel);
    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.reserve(static_cast<std::size_t>(nodes_per_panel) * panels);
    rule.weights.reserve(static_cast<std::size_t>(nodes_per_panel) * panels);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h, rad = 0.5 * h;
        for (std::size_t i = 0; i < base.size(); ++i) {
            rule.nodes.push_back(mid + rad * base.nodes[i]);
            rule.weights.push_back(rad * base.weights[i]);
        }
    }
    return rule;
}

namespace {

// One pass of the oscillatory quadrature; also reports the L1 mass of the
// amplitude, which sets the absolute scale for the convergence test.
complex oscillatory_pass(const std::function<complex(double)>& amplitude,
                         double frequency, double a, double b, int panels,
                         double* l1_mass)
{
    const QuadratureRule rule = composite_gauss(32, panels, a, b);
    complex sum = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double x = rule.nodes[i];
        const complex amp = amplitude(x);
        const double phase = two_pi * frequency * x;
        sum += rule.weights[i] * amp * complex(std::cos(phase), std::sin(phase));
        mass += rule.weights[i] * std::abs(amp);
    }
    if (l1_mass) *l1_mass = mass;
    return sum;
}

} // namespace

complex oscillatory_integrate(const std::function<complex(double)>& amplitude,
                              double frequency, const QuadratureRule& rule,
                              double rel_tol, double extra_bandwidth, int max_refine)
{
    const double a = rule.a, b = rule.b;
    if (!(b > a)) fail_invalid("oscillatory_integrate: empty interval");
    // 8 nodes per oscillation with 32-node panels: each panel spans at most
    // 4 periods of the fastest phase present.
    const double osc_rate = std::abs(frequency) + std::abs(extra_bandwidth);
    int panels = std::max<int>(1, static_cast<int>(std::ceil(osc_rate * (b - a) / 4.0)));
    const int base_panels = std::max<int>(1, static_cast<int>(rule.size() / 32));
    panels = std::max(panels, base_panels);
    // Round up to a power of two so refinement grids nest across calls and
    // per-node caches in the amplitude can be shared between evaluations.
    panels = static_cast<int>(std::bit_ceil(static_cast<unsigned>(panels)));

    double mass = 0.0;
    complex prev = oscillatory_pass(amplitude, frequency, a, b, panels, &mass);
    for (int refine = 0; refine < max_refine; ++refine) {
        panels *= 2;
        const complex cur = oscillatory_pass(amplitude, frequency, a, b, panels, &mass);
        const double scale = std::max(std::abs(cur), mass);
        if (std::abs(cur - prev) <= rel_tol * std::max(scale, 1e-300)) return cur;
        prev = cur;
    }
    fail_runtime("oscillatory_integrate: node doubling failed to stabilize to "
                 + std::to_string(rel_tol) + " after " + std::to_string(max_refine)
                 + " refinements (frequency " + std::to_string(frequency) + ")");
}

} // namespace wplab
