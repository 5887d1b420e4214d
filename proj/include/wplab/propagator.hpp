// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Quadrature-accurate evolution of unit-frequency free waves.  Initial data
// lives on the Fourier side as per-harmonic radial profiles supported in the
// shell 1/2 < rho < 2; each mode evolves independently through a Hankel-type
// oscillatory integral, and fields are synthesized from mode values times
// spherical harmonics.

#ifndef WPLAB_PROPAGATOR_HPP
#define WPLAB_PROPAGATOR_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wplab/common.hpp"
#include "wplab/harmonics.hpp"
#include "wplab/quadrature.hpp"

namespace wplab {

// Radial frequency profile c-hat(rho) of one spherical-harmonic mode.
// Unit-frequency data vanishes outside (1/2, 2); the sampling rule spans the
// enclosing interval (1/4, 4) shared with the packet transform.
struct RadialProfile {
    std::function<complex(double)> fn; // c-hat(rho)
    bool unit_band = true;             // support contained in (1/2, 2)
    double feature_scale = 0.25;       // smallest rho-scale of variation
    QuadratureRule rule;               // sampling rule on (1/4, 4)
    std::vector<complex> values;       // fn at rule nodes
};

// Builds a profile (and verifies the support invariant when unit_band).
RadialProfile make_profile(std::function<complex(double)> fn, double feature_scale,
                           bool unit_band = true);

struct ModeEntry {
    int l = 0;
    int i = 0;
    RadialProfile profile;
};

// Initial data: a finite family of modes, optionally dyadically localized in
// angular frequency (N_loc > 0 requires profile support only for degrees in
// (N_loc/2, 4 N_loc)).
struct ModeSet {
    int n = 3;
    int N_loc = 0;
    SpherePoint axis{};
    std::vector<ModeEntry> entries;
    double truncation_tail = 0.0; // relative mass discarded by generators
    std::uint64_t seed = 0;       // provenance for reports
    std::string label;

    int max_degree() const;
    // Per-entry squared masses: integral |c-hat|^2 rho^{n-1} drho.
    std::vector<double> mode_masses() const;
    // ||u(0)||_{L^2(R^n)} via Plancherel: sqrt(area * sum of masses).
    double l2_norm() const;
    void scale(double factor);
    void check_invariants() const;
};

// Mode evolution c^l_i(t, r): the degree-l Hankel transform of the profile
// against the forward half-wave phase, including the small-r series branch
// that removes the apparent singularity of the r^{(2-n)/2} prefactor.
complex hankel_mode(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r);

// Analytic time derivative (phase differentiation under the integral).
complex hankel_mode_dt(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r);

// Analytic radial derivative (Bessel derivative identities under the
// integral); requires r >= 0.1 (away from the series branch).
complex hankel_mode_dr(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r);

// Evaluation of the propagated field u(t, r omega).
struct FieldSampler {
    ModeSet data;
    int time_sign = +1; // +1 forward phase, -1 backward

    complex mode_value(std::size_t entry, double t, double r) const;
    complex mode_dt(std::size_t entry, double t, double r) const;
    complex mode_dr(std::size_t entry, double t, double r) const;
    complex evaluate(double t, double r, const SpherePoint& omega) const;
};

complex evaluate_field(const FieldSampler& fs, double t, double r, const SpherePoint& omega);

// Data generators ------------------------------------------------------------

// Single radial (degree-0) smooth bump supported in (1/2, 2).
ModeSet make_radial_bump(int n);

// Unit-L2 random data localized at degrees l in (N, 2N): profiles are the
// shared band bump times random trigonometric polynomials; deterministic per
// seed.  Requires N <= L_max / 4 so the dyadic envelope stays resolvable.
// `zonal` keeps only the axisymmetric slot of each degree (same per-mode
// streams as the full family, renormalized).
ModeSet make_random_localized(int n, int N, std::uint64_t seed, int L_max = 128,
                              bool zonal = false);

// Knapp block data: the (mollified) indicator of the radially directed plate
//   1/2 < xi_1 < 2 - eps^2/8,  |xi_perp| <= eps/2,
// projected onto zonal harmonics about the first coordinate axis.  The
// angular truncation degree is round(4/eps); eps must be resolvable within
// L_max (eps >= 4/L_max).
ModeSet make_knapp(int n, double eps, int L_max = 64);

// The mollification scale used by make_knapp (recorded in reports).
double knapp_mollification(double eps);

// Half-wave splitting of position/velocity data (f, g):
//   h_pm = pm (4 pi i rho)^{-1} g-hat + f-hat / 2  per mode,
// so that u(t) = e^{+it sqrt(-Lap)} h_plus + e^{-it sqrt(-Lap)} h_minus solves
// the wave equation with u(0) = f, du/dt(0) = g.  With the FieldSampler
// convention (time_sign = +1 carries the phase e^{-2 pi i t rho}), h_plus
// pairs with time_sign = -1 and h_minus with time_sign = +1.
std::pair<ModeSet, ModeSet> split_half_waves(const ModeSet& f, const ModeSet& g);

// CSV dump of sampled profiles: records (n, l, i, rho, re, im).
void mode_set_to_csv(std::ostream& out, const ModeSet& data);

} // namespace wplab

#endif
