// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// The C-infinity cutoff family used everywhere in the lab.  One fixed ramp
// shape is glued into plateau bumps; all derivatives of the ramp vanish at
// both ends, so the glued bumps are globally smooth.

#ifndef WPLAB_CUTOFFS_HPP
#define WPLAB_CUTOFFS_HPP

namespace wplab {

// The standard compactly supported model bump: exp(1 - 1/(1 - t^2)) for
// |t| < 1 and 0 otherwise.  Equal to 1 at t = 0, flat to all orders at the
// support edges.
double model_bump(double t);

// Monotone C-infinity ramp: 0 for u <= 0, 1 for u >= 1.  Defined as the
// normalized antiderivative of model_bump (affinely mapped to (0, 1)), so all
// derivatives vanish at BOTH ends; the glued plateau joins are genuinely
// smooth, not merely C^1.  Evaluated from a precomputed cumulative-integral
// table plus one residual Gauss panel (absolute error well below 1e-14).
double smooth_ramp(double u);

// Plateau bump: 0 outside (a, d), ramps up on (a, b), 1 on [b, c], ramps down
// on (c, d).
inline double plateau_bump(double x, double a, double b, double c, double d)
{
    if (x <= a || x >= d) return 0.0;
    double v = 1.0;
    if (x < b) v *= smooth_ramp((x - a) / (b - a));
    if (x > c) v *= smooth_ramp((d - x) / (d - c));
    return v;
}

// Angular dyadic cutoff: identically 1 on [1, 2], supported in (1/2, 4).
inline double theta0(double x) { return plateau_bump(x, 0.5, 1.0, 2.0, 4.0); }

// Radial data profile bump: identically 1 on [3/4, 3/2], supported in (1/2, 2)
// (unit frequency band).
inline double unit_band_bump(double rho) { return plateau_bump(rho, 0.5, 0.75, 1.5, 2.0); }

// Wide bump for the packet kernel: identically 1 on [1/2, 2] (the whole unit
// band), supported in (1/4, 4).
inline double packet_band_bump(double rho) { return plateau_bump(rho, 0.25, 0.5, 2.0, 4.0); }

} // namespace wplab

#endif
