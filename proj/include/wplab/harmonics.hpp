// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Spherical-harmonic bases on S^{n-1} for n in {2,3,4}, the angular-Laplacian
// calculus (fractional powers, Sobolev norms, dyadic projections), and sphere
// quadrature.
//
// Conventions.  The sphere carries the NORMALIZED inner product
//   <F, G> = |S^{n-1}|^{-1} * integral_{S^{n-1}} F conj(G) domega,
// and every basis below is orthonormal with respect to it.  Quadrature
// weights, in contrast, carry the plain surface measure (they sum to
// |S^{n-1}|); callers divide by the area when they want averages.
//
//   n = 2 : {1, sqrt(2) cos(l tau), sqrt(2) sin(l tau)}, tau measured from a
//           configurable axis (default e1).
//   n = 3 : real spherical harmonics from fully normalized associated
//           Legendre functions about a configurable pole (default e3).
//           Index order per degree: i=0 zonal, i=2m-1 cosine, i=2m sine.
//   n = 4 : zonal functions only, Y^l(omega) = U_l(omega . axis) with U_l the
//           degree-l Chebyshev polynomial of the second kind (default axis
//           e1); sufficient for axially symmetric data and all
//           coefficient-level identities.

#ifndef WPLAB_HARMONICS_HPP
#define WPLAB_HARMONICS_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "wplab/common.hpp"

namespace wplab {

// A point on S^{n-1}; only the first n components are meaningful.
using SpherePoint = std::array<double, 4>;

SpherePoint default_axis(int n);

struct HarmonicIndex {
    int n = 3; // ambient dimension, sphere is S^{n-1}
    int l = 0; // degree
    int i = 0; // index within the degree-l eigenspace
};

// Dimension of the space of degree-l spherical harmonics on S^{n-1}
// (for n = 4 the full dimension, even though only zonal members are realized).
int dim_Y(int n, int l);

// Eigenvalue of -Delta_{S^{n-1}} on degree-l harmonics: l(n + l - 2).
double eigenvalue(int n, int l);

// Number of realized basis slots per degree: dim_Y for n in {2,3}, one zonal
// slot for n = 4.
int basis_slots(int n, int l);

// Flat-layout offset of degree l (sum of basis_slots below l).
int flat_offset(int n, int l);
int flat_size(int n, int L_max);

// Finitely supported expansion F = sum c^l_i Y^l_i in the realized basis.
struct SphereFunction {
    int n = 3;
    int L_max = 0;
    SpherePoint axis{}; // orientation of the basis (resolved at construction)
    std::vector<complex> coeffs;

    SphereFunction() : axis(default_axis(3)) {}
    SphereFunction(int n_, int L_max_);
    SphereFunction(int n_, int L_max_, const SpherePoint& axis_);

    complex& at(int l, int i);
    const complex& at(int l, int i) const;
    double l2_norm() const;                        // sqrt(sum |c|^2)
    complex evaluate(const SpherePoint& omega) const;
};

// Evaluates every realized basis function of degree <= L_max at omega into
// `out` (flat layout).  The basis is oriented about `axis`.
void eval_basis_all(int n, int L_max, const SpherePoint& omega, const SpherePoint& axis,
                    std::vector<double>& out);

// Single basis function value (convenience wrapper over eval_basis_all).
double eval_basis(const HarmonicIndex& idx, const SpherePoint& omega);
double eval_basis(const HarmonicIndex& idx, const SpherePoint& omega, const SpherePoint& axis);

// max over sample points of |sum_i Y^l_i(omega)^2 - dim| / dim.  Requires the
// full basis (n in {2,3}).
double addition_theorem_residual(int n, int l, const std::vector<SpherePoint>& samples);

// Fractional power of the angular Laplacian: c^l_i -> [l(n+l-2)]^{s/2} c^l_i.
// s = 0 is the identity.  For s > 0 the degree-0 coefficient maps to 0; for
// s < 0 a nonzero degree-0 coefficient is rejected.
SphereFunction omega_power(const SphereFunction& F, double s);

// sqrt(||F||^2 + || |Omega|^s F ||^2), coefficient-wise.  Requires s >= 0.
double hs_omega_norm(const SphereFunction& F, double s);

// Angular dyadic projection: c^l_i -> theta0(2^{-j} l) c^l_i for j >= 0;
// the sentinel DYADIC_ZERO selects the degree-0 part alone.
inline constexpr int DYADIC_ZERO = -1;
SphereFunction dyadic_project(const SphereFunction& F, int j);

// Quadrature on S^{n-1}: weights sum to the surface area |S^{n-1}| and all
// products of basis functions with combined degree <= exactness_degree are
// integrated exactly (to roundoff).
struct AngularQuadrature {
    int n = 3;
    int exactness_degree = 0;
    std::vector<SpherePoint> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

AngularQuadrature make_angular_quadrature(int n, int degree);
AngularQuadrature make_angular_quadrature(int n, int degree, const SpherePoint& axis);

// sup|F| / (N^{(n-1)/2} ||F||_{L^2}) with the sup taken over the quadrature
// nodes plus a local refinement pass around the best node, and N the largest
// degree carrying a nonzero coefficient (N = 1 for constants).  Rejects the
// zero function.
double bernstein_ratio(const SphereFunction& F, const AngularQuadrature& quad);

// Flat record serialization: one "n,l,i,re,im" line per coefficient.
void sphere_function_to_csv(std::ostream& out, const SphereFunction& F);
SphereFunction sphere_function_from_csv(std::istream& in);

} // namespace wplab

#endif
