// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Space-time norms of propagated fields (mixed L^q_t(L^r_x), dual-scale
// l^p over cubes of per-cube L^2 mass, weighted Morawetz integrals) and the
// estimate-verification harness built on them: dispersive, endpoint
// Strichartz, dual-scale, Knapp-sharpness, and Morawetz scans, each emitting
// an EstimateReport with the raw scan points, the fitted slopes, and a
// verdict that is reproducible from the stored data.

#ifndef WPLAB_ANALYSIS_HPP
#define WPLAB_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wplab/common.hpp"
#include "wplab/harmonics.hpp"
#include "wplab/propagator.hpp"
#include "wplab/wavepackets.hpp"

namespace wplab {

// ---------------------------------------------------------------------------
// Evaluation grids
// ---------------------------------------------------------------------------

// Product quadrature over a space-time slab [0, T] x {|x| <= R}.  Time nodes
// are piecewise-uniform (so phase recurrences apply); radial nodes come from
// composite Gauss panels on (0, R) with plain dr weights (norm code applies
// the r^{n-1} volume factor); the angular rule carries the full surface
// measure.  The optional cube partition (side 1/mu, cubes centered on the
// scaled integer lattice so the origin lies inside a cube) feeds the
// dual-scale norms.  Cone-adapted windows restrict which radii are active at
// each time node: node i touches r in [t_i - window_in[i], t_i + window_out[i]];
// empty window vectors mean every radius is active at every time.
struct EvaluationGrid {
    int n = 3;
    std::vector<double> time_nodes;
    std::vector<double> time_weights;
    std::vector<double> radial_nodes;
    std::vector<double> radial_weights;
    AngularQuadrature angular;
    double mu = 0.0; // cube partition side 1/mu when > 0 (n in {2,3})
    std::vector<double> window_in;
    std::vector<double> window_out;

    double max_time() const;
    double max_radius() const;
    std::uint64_t hash() const; // FNV-1a fingerprint for reports
    // Weight positivity, window consistency, cube-partition preconditions.
    void check() const;
};

// Uniform-time grid: composite Simpson on [0, T] with step ~dt (rounded so
// the count is odd), radial composite Gauss panels of unit width with
// `radial_nodes_per_unit` nodes each, and an angular rule of the given
// exactness degree.
EvaluationGrid make_evaluation_grid(int n, double T, double dt, double R,
                                    int radial_nodes_per_unit, int angular_degree,
                                    double mu = 0.0);

// Scan grid for a Knapp wave of aperture eps: octave-graded Simpson time
// nodes on [0, eps^{-2}] (step dt grows with t, capped), radii covering the
// moving wave region with cone-adapted windows sized by the transverse
// spread eps^{-1} + eps*t, and an angular rule resolving |u|^6 of degree
// max_degree data.
EvaluationGrid make_knapp_grid(int n, double eps, int max_degree);

// ---------------------------------------------------------------------------
// Batched column evaluation
// ---------------------------------------------------------------------------

// Evaluates every mode of `data` on the grid, one radial column at a time:
// for column j the callback receives the values c^l_i(t_k, r_j) for the
// contiguous active time range [time_lo, time_lo + time_count), laid out as
// values[k * entries + e] in the entry order of data.entries.  Columns are
// processed in parallel; the callback must be safe for concurrent calls on
// distinct columns (write only to per-column slots).  Agrees with
// hankel_mode to the quadrature tolerance (~1e-8 relative).
using ColumnCallback =
    std::function<void(int column, int time_lo, int time_count, const complex* values)>;
void scan_mode_columns(const ModeSet& data, int time_sign, const EvaluationGrid& grid,
                       int threads, const ColumnCallback& cb);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

// ||u(t)||_{L^r(R^n)} by quadrature, volume factors reinstated.
// r_exponent in [2, inf]; inf takes the grid sup with one golden-section
// polar refinement per local max.
double lr_norm(const FieldSampler& fs, double t, double r_exponent,
               const EvaluationGrid& grid, int threads = 1);

// ( integral_0^T ||u(t)||_{L^r}^q dt )^{1/q} over the grid's time window,
// q in [2, inf).  When min_mass_fraction is non-null it receives the
// smallest fraction of the conserved L^2 mass captured inside the active
// radial window over all time nodes (the radial-truncation report).
double mixed_norm(const FieldSampler& fs, double q, double r_exponent,
                  const EvaluationGrid& grid, int threads = 1,
                  double* min_mass_fraction = nullptr);

// ( sum_cubes ||u(t)||_{L^2(Q)}^p )^{1/p} with per-cube L^2 mass accumulated
// by assigning each quadrature node to the cube containing it.  p in [1, inf]
// (inf = max over cubes); mu in (0, 1] else rejected.
double dual_scale_norm(const FieldSampler& fs, double t, double mu, double p,
                       const EvaluationGrid& grid, int threads = 1);

// Sampled-field variants sharing the norm-assembly code path; closed-form
// oracles (constant on a ball, single-cube bumps, frozen fields) enter here.
using SampledField = std::function<complex(double t, double r, const SpherePoint& omega)>;
double sampled_lr_norm(const SampledField& field, double t, double r_exponent,
                       const EvaluationGrid& grid);
double sampled_mixed_norm(const SampledField& field, double q, double r_exponent,
                          const EvaluationGrid& grid);
double sampled_dual_scale_norm(const SampledField& field, double t, double mu, double p,
                               const EvaluationGrid& grid);

// H^s_Omega norm of the initial data, mirroring hs_omega_norm on the sphere:
// sqrt(area * sum_l (1 + lambda_l^s) mass_l) with lambda_l = l(n+l-2) (and
// 0^0 = 1, so s = 0 gives sqrt(2) times the L^2 norm); s < 0 is rejected
// when degree-0 mass is present.
double hs_omega_data_norm(const ModeSet& data, double s);

// ---------------------------------------------------------------------------
// Least-squares fits
// ---------------------------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;       // 1 - SS_res/SS_tot (1 when SS_tot = 0)
    double max_abs_residual = 0.0; // in log space
};

// Ordinary least squares of log y against log x; requires positive inputs
// and at least two points.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct BilinearFit {
    double a = 0.0; // coefficient of log x1
    double b = 0.0; // coefficient of log x2
    double intercept = 0.0;
    double r_squared = 1.0;
    double max_abs_residual = 0.0;
};

// Least squares of log y against (log x1, log x2, 1).
BilinearFit fit_bilinear(const std::vector<double>& x1, const std::vector<double>& x2,
                         const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, inconclusive, not_applicable };
const char* verdict_name(Verdict v);

// One measured scan point; unused parameters stay 0.
struct ScanPoint {
    double N = 0.0;
    double eps = 0.0;
    double mu = 0.0;
    double eta = 0.0;
    double r_exponent = 0.0;
    double q = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
    double value = 0.0;
    double reference = 0.0; // fitted-model value or calibrated bound at this point
};

struct EstimateReport {
    std::string name;
    std::vector<ScanPoint> points;
    double slope = 0.0;
    double slope_b = 0.0; // second bilinear coefficient when applicable
    double intercept = 0.0;
    double r_squared = 1.0;
    double max_abs_residual = 0.0;
    double threshold = 0.0; // pass bound on the decisive quantity
    double measured = 0.0;  // the decisive quantity itself
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::uint64_t> seeds;
    std::uint64_t grid_hash = 0;
    std::string remark;

    // CSV rows: name,N,eps,mu,eta,r,q,T,seed,value,reference (one per point).
    void to_csv(std::ostream& out) const;
    // Single JSON-like summary record.
    void summary(std::ostream& out) const;
};

// Slope verdict with the R^2 gate: fits with R^2 < 0.9 are INCONCLUSIVE
// unless the data is flat to within near_zero_band in log space (R^2 is
// meaningless for constant data).
Verdict slope_verdict(bool slope_ok, double r_squared, double max_abs_residual,
                      double near_zero_band = 0.15);

// ---------------------------------------------------------------------------
// Estimate drivers
// ---------------------------------------------------------------------------

// Data family scanned by the drivers.  The axisymmetric family keeps one
// random profile per degree (the i = 0 slice of the full random family) so
// sup/omega evaluations reduce to the polar profile; `full` uses every basis
// slot; `radial` is the degree-0 bump (no N to vary).
enum class DataFamily { zonal, full, radial };

// Threshold exponent r_eta = 2(n-1)/(n-2) * (1+eta), clipped to the open
// spherical-threshold window (2(n-1)/(n-2), 2(n-1)/(n-3)] (upper bound
// +inf when n = 3); reproduces r_eta = 4.5 at (n=3, eta=1/8) and the n=2
// time-exponent analog q_eta = 2(1+eta) = 2.25.
double default_r_eta(int n, double eta);

// Sup_omega |u(t, r omega)| <= C N^{(n-1)/2} (sum_k |c_k|^2/(1+|t-k/4|)^{n-1})^{1/2}:
// calibrates C on N = 4 data over calibration_seeds, then requires the max
// ratio over holdout_seeds x holdout_N to stay below C.
EstimateReport verify_dispersive(int n, const std::vector<std::uint64_t>& calibration_seeds,
                                 const std::vector<std::uint64_t>& holdout_seeds,
                                 const std::vector<int>& holdout_N, int threads = 1);

// ||u||_{L^2(L^{r_eta})} / ||u(0)||_2 against N (max over seeds per N);
// pass iff the log-log slope <= 1/2 + eta + 0.1.  n = 2 uses the
// L^{q_eta}(L^inf) variant.  Fewer than three N values are rejected; the
// radial family reports NOT_APPLICABLE (no N to vary).
EstimateReport verify_endpoint(int n, const std::vector<int>& N_list, double eta,
                               const std::vector<std::uint64_t>& seeds,
                               DataFamily family = DataFamily::zonal, int threads = 1);

// || (sum_cubes ||u||^{r_eta}_{L^2(Q)})^{1/r_eta} ||_{L^2_t} / ||u(0)||_2
// over (N, mu); bilinear fit a log N + b log(1/mu); pass iff
// a <= 1/2 + eta + 0.1 and b <= 1/2 + 2 eta + 0.1.  n = 3.
EstimateReport verify_dual_scale(const std::vector<int>& N_list,
                                 const std::vector<double>& mu_list, double eta,
                                 const std::vector<std::uint64_t>& seeds, int threads = 1);

// ||u^eps||_{L^2([0,eps^{-2}], L^r)} / ||f^eps||_{L^2} against eps for Knapp
// data; the expected exponent is -(sigma/2 - 1/2 - sigma/r), sigma = (n-1)/2
// (zero at the classical endpoint r = 2(n-1)/(n-3)); pass iff the measured
// slope is within 0.15 of it.  Also reports the H^s_Omega-compensated slope
// at s = 2(sigma/2 - 1/2 - sigma/r) and the data-norm scaling
// ||f^eps||_{H^s_Omega}/||f^eps|| ~ eps^{-s} at s in {1/2, 1}.
EstimateReport verify_knapp_sharpness(int n, const std::vector<double>& eps_list,
                                      double r_exponent, int L_max = 64, int threads = 1);

// integral_0^T integral (1+r)^{-1-eta} |u|^2 dx dt for T in T_list on the
// radial bump; pass iff the T=32 -> T=64 increase is <= 5% and the total
// stays below C_M ||u(0)||^2 with C_M fixed on the calibration seeds at
// T = 8 (times a factor-2 tail allowance) and checked on holdout seeds.
EstimateReport verify_morawetz(double eta, const std::vector<double>& T_list,
                               const std::vector<std::uint64_t>& calibration_seeds,
                               const std::vector<std::uint64_t>& holdout_seeds,
                               int threads = 1);

// ---------------------------------------------------------------------------
// Morawetz weight calculus
// ---------------------------------------------------------------------------

// The radial multiplier X = f(r) d/dr with f = r/(eps + r) (or f = 1 when
// constant_f), its divergence tr pi = f' + (n-1) f / r, and two closed forms
// for the radial Laplacian of tr pi:
//   * tr_pi_laplacian: the Laplacian proper,
//       -[ (n-1)(n-3) r^2 + 2(n^2-2n-2) eps r + (n-1)(n+1) eps^2 ] / (r (eps+r)^4),
//     the form entering the divergence identity;
//   * tr_pi_laplacian_termwise: the variant organized as
//       -[ (n-3) r + 3 (n-3) eps r/(eps+r) + 3 eps^2 (n-1)/(eps+r) ] / (r (eps+r)^3)
//     whose bracket is manifestly a sum of nonnegative terms for n >= 3.
// The two differ by (n-2)[(n-3) r^2 + 2(n-2) eps r + (n-1) eps^2]/(r (eps+r)^4)
// >= 0, so the termwise form is an upper bound; both are <= 0 for n >= 3.
struct MorawetzWeight {
    int n = 3;
    double eps = 1.0;
    bool constant_f = false;

    double f(double r) const;
    double f_prime(double r) const;
    double tr_pi(double r) const;
    double tr_pi_prime(double r) const;
    double tr_pi_laplacian(double r) const;
    double tr_pi_laplacian_termwise(double r) const;
};

// Max of both closed-form Laplacians over r_grid (n in {3,4}, eps > 0);
// nonpositivity means the Morawetz bulk term has a good sign.
double morawetz_negativity_scan(int n, double eps, const std::vector<double>& r_grid);

// Divergence identity for the modified momentum density of phi = Re u along
// X = f d/dr, with components normalized so the energy density is
// e = (|d_t phi|^2 + |grad phi|^2)/4:
//   P~_t = f d_t phi d_r phi / 2 + tr_pi phi d_t phi / 4,
//   P~_r = f (|d_t phi|^2 + |d_r phi|^2 - |angular grad phi|^2)/4
//          + tr_pi phi d_r phi / 4 - tr_pi' phi^2 / 8,
//   P~_theta = f d_theta phi d_r phi / 2 + tr_pi phi d_theta phi / 4,
// whose space-time divergence equals
//   f' |d_r phi|^2 / 2 + (f/r) |angular grad phi|^2 / 2
//   - tr_pi_laplacian phi^2 / 8
// on solutions.  Sample points are (t, r, theta) triples (theta is the polar
// angle about the data axis; it is immaterial for purely radial data).  The
// data must be axisymmetric.  The divergence is formed by fourth-order finite
// differences of the components (time and radial derivatives of phi itself
// are analytic per mode); returns the max residual over the sample points
// relative to the local energy density (floored at 1e-3 of the largest
// sampled density so isolated nodes of the field cannot divide by zero).
// Points with r < 0.5 are rejected.  freeze_time evaluates the field at
// fixed time t (a non-solution), the negative control: the identity must
// then fail.
double verify_energy_momentum_identity(const FieldSampler& fs,
                                       const std::vector<std::array<double, 3>>& points,
                                       const MorawetzWeight& weight,
                                       bool freeze_time = false);

} // namespace wplab

#endif
