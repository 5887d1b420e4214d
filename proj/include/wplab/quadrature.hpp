// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Gauss-Legendre quadrature, composite panels, and an oscillatory integrator
// for band-limited amplitudes against pure phases e^{2*pi*i*freq*rho}.

#ifndef WPLAB_QUADRATURE_HPP
#define WPLAB_QUADRATURE_HPP

#include <functional>

#include "wplab/common.hpp"

namespace wplab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = -1.0; // interval covered by the rule
    double b = 1.0;

    std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on (-1, 1).  Nodes by Newton iteration on
// Legendre polynomials; results cached per n.
QuadratureRule gauss_legendre(int n);

// n-point Gauss-Legendre rule mapped to (a, b).
QuadratureRule gauss_legendre(int n, double a, double b);

// `panels` adjacent copies of an n-point Gauss-Legendre rule tiling (a, b).
QuadratureRule composite_gauss(int nodes_per_panel, int panels, double a, double b);

// integral over (rule.a, rule.b) of amplitude(rho) * e^{2*pi*i*frequency*rho}.
//
// The interval is tiled with 32-node Gauss-Legendre panels, at least 8 nodes
// per oscillation of the phase (extra_bandwidth adds further oscillation
// budget for amplitudes that themselves oscillate, e.g. Bessel factors).  The
// panel count is doubled until the result is stable to rel_tol relative to
// max(|I|, integral of |amplitude|); failure to stabilize within max_refine
// doublings is an error, never silently accepted.
complex oscillatory_integrate(const std::function<complex(double)>& amplitude,
                              double frequency,
                              const QuadratureRule& rule,
                              double rel_tol = 1e-10,
                              double extra_bandwidth = 0.0,
                              int max_refine = 9);

} // namespace wplab

#endif
