// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Private helpers shared by the norm engine (analysis.cpp) and the estimate
// drivers (estimates.cpp).  Not part of the installed interface.

#ifndef WPLAB_ANALYSIS_INTERNAL_HPP
#define WPLAB_ANALYSIS_INTERNAL_HPP

#include <cstddef>
#include <vector>

#include "wplab/analysis.hpp"

namespace wplab::detail {

// True when every entry is axisymmetric about the data axis.
bool is_zonal(const ModeSet& data);

// Zonal basis value: n=2 uses the angle tau, n in {3,4} the cosine c.
double zonal_basis(int n, int l, double c, double tau);

// Polar quadrature carrying the full surface measure reduced to the axis
// variable: n=2 uniform in tau on [0, 2 pi); n=3 Gauss in c = cos(theta)
// (weight 2 pi w); n=4 Gauss-Chebyshev second kind (weight 4 pi^2/(m+1) s^2).
struct PolarRule {
    int n = 3;
    std::vector<double> x; // tau for n=2 (ascending), c otherwise (ascending)
    std::vector<double> w;
};

// Nodes sized so products of zonal basis functions up to `degree` integrate
// exactly (plus padding).
PolarRule make_polar_rule(int n, int degree);

// Dense polar basis table B[node * entries + e] for a zonal mode set.
struct ZonalTable {
    PolarRule rule;
    std::vector<int> degrees; // per entry
    std::vector<double> B;
    int entries = 0;

    void build(const ModeSet& data, int degree);
};

// sup over the sphere of |sum_e v[e] Y_{l_e}|: grid max over the table plus
// the poles (n >= 3), then one golden-section refinement of the winning
// bracket.
double zonal_sup(const ZonalTable& zt, const complex* v);

// Per-time-node norms of a propagated field over a grid: norm_t[i] is
// ||u(t_i)||_{L^r} (the sphere sup composed with the radial grid max when
// sup_in_x), mass_t[i] the captured L^2 mass inside the active window.
struct NormTrace {
    std::vector<double> norm_t;
    std::vector<double> mass_t;
    double min_mass_fraction = 1.0;
};

NormTrace norm_trace(const FieldSampler& fs, double r_exponent, const EvaluationGrid& grid,
                     int threads);

// Dense cube-mass accumulator over cubes of side `side` centered on the
// scaled integer lattice (the origin interior to a cube).
struct CubeBins {
    int n = 3;
    double side = 1.0;
    int K = 0; // indices clamped to [-K, K]
    std::vector<double> mass;

    void init(int n_, double side_, double radius);
    void reset();
    std::size_t index(const double* x) const;
    void add(const double* x, double m) { mass[index(x)] += m; }
    // ( sum_cubes mass^{p/2} )^{1/p}; p = inf takes sqrt(max mass).
    double lp(double p) const;
};

// Splits the surface-weighted ring mass `w_mass` (radius r, polar cosine c,
// already including |u|^2 and all quadrature weights) uniformly over
// max(8, ceil(8 pi r sin(theta) mu)) azimuthal samples and bins them; the
// total is exact for any sample count because the field is axisymmetric.
void bin_ring(CubeBins& bins, double r, double c, double w_mass, double mu);

} // namespace wplab::detail

#endif
