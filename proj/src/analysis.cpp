// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <ostream>

#include "analysis_internal.hpp"
#include "wplab/parallel.hpp"
#include "wplab/quadrature.hpp"
#include "wplab/specfun.hpp"

namespace wplab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Power-of-two panel count resolving `bandwidth` rho-oscillations on the
// band (1/4, 4) with at least 8 nodes per cycle on 32-node panels; dyadic
// counts keep distinct columns sharing a handful of rules.
int panels_for_bandwidth(double bandwidth, int min_panels)
{
    const double cycles = std::max(1.0, bandwidth) * 3.75;
    const double needed = std::ceil(cycles * 8.0 / 32.0);
    const int panels = std::max(min_panels, static_cast<int>(needed));
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(panels)));
}

// Maximal uniform-spacing segments of the (sorted) time nodes; the engine
// advances the phase e^{-2 pi i t rho} by one complex multiply per node
// inside a run.
struct TimeRun {
    int first = 0;
    int count = 0;
    double t0 = 0.0;
    double dt = 0.0;
};

std::vector<TimeRun> uniform_runs(const std::vector<double>& t)
{
    std::vector<TimeRun> runs;
    const int m = static_cast<int>(t.size());
    int i = 0;
    while (i < m) {
        TimeRun run;
        run.first = i;
        run.t0 = t[static_cast<std::size_t>(i)];
        run.count = 1;
        if (i + 1 < m) {
            run.dt = t[static_cast<std::size_t>(i + 1)] - t[static_cast<std::size_t>(i)];
            while (i + run.count < m
                   && std::abs(t[static_cast<std::size_t>(i + run.count)]
                               - (run.t0 + run.dt * run.count))
                          <= 1e-9 * (1.0 + std::abs(run.t0)))
                ++run.count;
        }
        runs.push_back(run);
        i += run.count;
    }
    return runs;
}

// Composite Simpson weights on an odd node count with spacing dt.
std::vector<double> simpson_weights(int count, double dt)
{
    if (count < 3 || count % 2 == 0)
        fail_invalid("Simpson weights need an odd node count of at least 3");
    std::vector<double> w(static_cast<std::size_t>(count), 0.0);
    for (int k = 0; k + 2 < count; k += 2) {
        w[static_cast<std::size_t>(k)] += dt / 3.0;
        w[static_cast<std::size_t>(k + 1)] += 4.0 * dt / 3.0;
        w[static_cast<std::size_t>(k + 2)] += dt / 3.0;
    }
    return w;
}

// Appends a Simpson block on [a, b] with step ~dt, merging the shared
// endpoint with an existing final node at t = a.
void append_simpson_block(std::vector<double>& nodes, std::vector<double>& weights, double a,
                          double b, double dt)
{
    int steps = std::max(2, static_cast<int>(std::ceil((b - a) / dt)));
    if (steps % 2 == 1) ++steps;
    const double h = (b - a) / steps;
    const std::vector<double> w = simpson_weights(steps + 1, h);
    std::size_t start = 0;
    if (!nodes.empty() && std::abs(nodes.back() - a) <= 1e-9 * (1.0 + std::abs(a))) {
        weights.back() += w[0];
        start = 1;
    }
    for (std::size_t k = start; k < w.size(); ++k) {
        nodes.push_back(a + h * static_cast<double>(k));
        weights.push_back(w[k]);
    }
}

// Active contiguous time-index range for a column at radius r.
void active_time_range(const EvaluationGrid& g, double r, int* lo, int* count)
{
    const int m = static_cast<int>(g.time_nodes.size());
    if (g.window_in.empty()) {
        *lo = 0;
        *count = m;
        return;
    }
    int first = -1;
    int last = -2;
    for (int i = 0; i < m; ++i) {
        const double t = g.time_nodes[static_cast<std::size_t>(i)];
        if (r >= t - g.window_in[static_cast<std::size_t>(i)]
            && r <= t + g.window_out[static_cast<std::size_t>(i)]) {
            if (first < 0) first = i;
            last = i;
        }
    }
    *lo = std::max(0, first);
    *count = last - first + 1;
}

double volume_factor(int n, double r) { return std::pow(r, n - 1); }

} // namespace

// ---------------------------------------------------------------------------
// EvaluationGrid
// ---------------------------------------------------------------------------

double EvaluationGrid::max_time() const
{
    return time_nodes.empty() ? 0.0 : time_nodes.back();
}

double EvaluationGrid::max_radius() const
{
    return radial_nodes.empty() ? 0.0 : radial_nodes.back();
}

std::uint64_t EvaluationGrid::hash() const
{
    std::uint64_t h = fnv1a(&n, sizeof n);
    auto mix = [&h](const std::vector<double>& v) {
        const std::size_t m = v.size();
        h = fnv1a(&m, sizeof m, h);
        if (m) h = fnv1a(v.data(), m * sizeof(double), h);
    };
    mix(time_nodes);
    mix(time_weights);
    mix(radial_nodes);
    mix(radial_weights);
    mix(window_in);
    mix(window_out);
    h = fnv1a(&mu, sizeof mu, h);
    h = fnv1a(&angular.exactness_degree, sizeof angular.exactness_degree, h);
    return h;
}

void EvaluationGrid::check() const
{
    if (n < 2 || n > 4) fail_invalid("EvaluationGrid: dimension must be 2, 3, or 4");
    if (time_nodes.size() != time_weights.size())
        fail_invalid("EvaluationGrid: time node/weight size mismatch");
    if (radial_nodes.size() != radial_weights.size())
        fail_invalid("EvaluationGrid: radial node/weight size mismatch");
    if (radial_nodes.empty()) fail_invalid("EvaluationGrid: no radial nodes");
    for (double w : time_weights)
        if (!(w > 0.0)) fail_invalid("EvaluationGrid: time weights must be positive");
    for (double w : radial_weights)
        if (!(w > 0.0)) fail_invalid("EvaluationGrid: radial weights must be positive");
    for (std::size_t j = 0; j < radial_nodes.size(); ++j) {
        if (!(radial_nodes[j] > 0.0)) fail_invalid("EvaluationGrid: radii must be positive");
        if (j && radial_nodes[j] <= radial_nodes[j - 1])
            fail_invalid("EvaluationGrid: radii must increase");
    }
    for (std::size_t i = 1; i < time_nodes.size(); ++i)
        if (time_nodes[i] <= time_nodes[i - 1])
            fail_invalid("EvaluationGrid: time nodes must increase");
    if (!window_in.empty()
        && (window_in.size() != time_nodes.size() || window_out.size() != time_nodes.size()))
        fail_invalid("EvaluationGrid: window vectors must match the time nodes");
    if (mu != 0.0) {
        if (!(mu > 0.0) || mu > 1.0)
            fail_invalid("EvaluationGrid: cube partition scale mu must lie in (0, 1]");
        if (n == 4) fail_invalid("EvaluationGrid: cube partitions are for n in {2, 3}");
    }
}

EvaluationGrid make_evaluation_grid(int n, double T, double dt, double R,
                                    int radial_nodes_per_unit, int angular_degree, double mu)
{
    if (!(T > 0.0) || !(dt > 0.0)) fail_invalid("make_evaluation_grid: T and dt must be positive");
    if (!(R >= 1.0)) fail_invalid("make_evaluation_grid: radial extent must be at least 1");
    if (radial_nodes_per_unit < 4)
        fail_invalid("make_evaluation_grid: need at least 4 radial nodes per unit length");
    EvaluationGrid g;
    g.n = n;
    append_simpson_block(g.time_nodes, g.time_weights, 0.0, T, dt);
    const int panels = static_cast<int>(std::ceil(R));
    const QuadratureRule rr =
        composite_gauss(radial_nodes_per_unit, panels, 0.0, static_cast<double>(panels));
    g.radial_nodes = rr.nodes;
    g.radial_weights = rr.weights;
    g.angular = make_angular_quadrature(n, angular_degree);
    g.mu = mu;
    g.check();
    return g;
}

EvaluationGrid make_knapp_grid(int n, double eps, int max_degree)
{
    if (!(eps > 0.0) || eps > 0.5) fail_invalid("make_knapp_grid: eps must lie in (0, 1/2]");
    EvaluationGrid g;
    g.n = n;
    const double T = 1.0 / (eps * eps);
    // Octave-graded Simpson blocks: fine sampling while the block forms,
    // steps growing with t once the profile evolves on the t-scale only.
    double a = 0.0;
    double b = std::min(8.0, T);
    append_simpson_block(g.time_nodes, g.time_weights, 0.0, b, 0.25);
    while (b < T) {
        a = b;
        b = std::min(2.0 * a, T);
        const double dt = std::min(1.0, std::max(0.25, a / 64.0));
        append_simpson_block(g.time_nodes, g.time_weights, a, b, dt);
    }
    const double width = 1.0 / eps;
    const double R = T + width + 16.0;
    const int panels = static_cast<int>(std::ceil(R));
    const QuadratureRule rr = composite_gauss(10, panels, 0.0, static_cast<double>(panels));
    g.radial_nodes = rr.nodes;
    g.radial_weights = rr.weights;
    g.angular = make_angular_quadrature(n, std::max(8, 6 * max_degree + 8));
    // Cone-adapted radial activity: until the wave leaves the initial ball
    // every radius participates; afterwards the significant field lives in
    // the shell r in [t - w_in, t + w_out] with w set by the transverse
    // spread W(t) = eps^{-1} + eps t folded into the radius, W^2/(2t).
    g.window_in.resize(g.time_nodes.size());
    g.window_out.resize(g.time_nodes.size());
    for (std::size_t i = 0; i < g.time_nodes.size(); ++i) {
        const double t = g.time_nodes[i];
        if (t <= 2.0 * width) {
            g.window_in[i] = g.window_out[i] = R + T; // everything active
        } else {
            const double w = width + eps * t;
            g.window_out[i] = 10.0 + 0.5 * w * w / t;
            g.window_in[i] = g.window_out[i] + 8.0;
        }
    }
    g.check();
    return g;
}

// ---------------------------------------------------------------------------
// Column engine
// ---------------------------------------------------------------------------

void scan_mode_columns(const ModeSet& data, int time_sign, const EvaluationGrid& grid,
                       int threads, const ColumnCallback& cb)
{
    grid.check();
    if (data.n != grid.n) fail_invalid("scan_mode_columns: data and grid dimensions differ");
    if (data.entries.empty()) fail_invalid("scan_mode_columns: empty mode set");
    const int E = static_cast<int>(data.entries.size());
    const int L = data.max_degree();
    const int cols = static_cast<int>(grid.radial_nodes.size());
    const double sign = time_sign > 0 ? 1.0 : -1.0;

    // Profile floor: the rho rule must resolve the narrowest profile feature.
    int floor_panels = 1;
    for (const ModeEntry& e : data.entries)
        floor_panels = std::max(floor_panels, static_cast<int>(e.profile.rule.size()) / 32);

    // Per-column active ranges and panel counts.
    std::vector<int> lo(static_cast<std::size_t>(cols)), cnt(static_cast<std::size_t>(cols)),
        pan(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        active_time_range(grid, grid.radial_nodes[static_cast<std::size_t>(j)],
                          &lo[static_cast<std::size_t>(j)], &cnt[static_cast<std::size_t>(j)]);
        double t_hi = 0.0;
        if (cnt[static_cast<std::size_t>(j)] > 0)
            t_hi = std::abs(grid.time_nodes[static_cast<std::size_t>(
                lo[static_cast<std::size_t>(j)] + cnt[static_cast<std::size_t>(j)] - 1)]);
        pan[static_cast<std::size_t>(j)] = panels_for_bandwidth(
            grid.radial_nodes[static_cast<std::size_t>(j)] + t_hi, floor_panels);
    }

    // Pre-evaluate every profile on every distinct rho rule (single-threaded:
    // profile closures may share lazily filled caches).
    struct Prep {
        QuadratureRule rule;
        std::vector<complex> prof; // [entry * nodes + node]
    };
    std::map<int, Prep> prepared;
    for (int j = 0; j < cols; ++j) {
        if (cnt[static_cast<std::size_t>(j)] <= 0) continue;
        const int p = pan[static_cast<std::size_t>(j)];
        if (prepared.count(p)) continue;
        Prep prep;
        prep.rule = composite_gauss(32, p, 0.25, 4.0);
        const std::size_t m = prep.rule.size();
        prep.prof.resize(static_cast<std::size_t>(E) * m);
        for (int e = 0; e < E; ++e)
            for (std::size_t q = 0; q < m; ++q)
                prep.prof[static_cast<std::size_t>(e) * m + q] =
                    data.entries[static_cast<std::size_t>(e)].profile.fn(prep.rule.nodes[q]);
        prepared.emplace(p, std::move(prep));
    }

    const std::vector<TimeRun> runs = uniform_runs(grid.time_nodes);

    run_tiled(cols, threads, [&](int col_lo, int col_hi) {
        std::vector<complex> amp(static_cast<std::size_t>(E));
        std::vector<complex> acc;
        std::vector<double> bess(static_cast<std::size_t>(L + 1));
        std::vector<complex> pref(static_cast<std::size_t>(E));
        for (int j = col_lo; j < col_hi; ++j) {
            const int count = cnt[static_cast<std::size_t>(j)];
            if (count <= 0) continue;
            const int t_lo = lo[static_cast<std::size_t>(j)];
            const double r = grid.radial_nodes[static_cast<std::size_t>(j)];
            const Prep& prep = prepared.at(pan[static_cast<std::size_t>(j)]);
            const std::size_t m = prep.rule.size();
            acc.assign(static_cast<std::size_t>(count) * static_cast<std::size_t>(E),
                       complex(0.0, 0.0));
            const double rpow = std::pow(r, 0.5 * (2 - grid.n));
            for (int e = 0; e < E; ++e)
                pref[static_cast<std::size_t>(e)] =
                    two_pi * rpow * unit_imag_pow(data.entries[static_cast<std::size_t>(e)].l);
            for (std::size_t q = 0; q < m; ++q) {
                const double rho = prep.rule.nodes[q];
                bessel_j_batch(grid.n - 2, L + 1, two_pi * r * rho, bess.data());
                const double common = std::pow(rho, 0.5 * grid.n) * prep.rule.weights[q];
                for (int e = 0; e < E; ++e) {
                    const int l = data.entries[static_cast<std::size_t>(e)].l;
                    amp[static_cast<std::size_t>(e)] =
                        prep.prof[static_cast<std::size_t>(e) * m + q]
                        * pref[static_cast<std::size_t>(e)]
                        * (bess[static_cast<std::size_t>(l)] * common);
                }
                for (const TimeRun& run : runs) {
                    const int a = std::max(run.first, t_lo);
                    const int b = std::min(run.first + run.count, t_lo + count);
                    if (a >= b) continue;
                    const double t_a = run.t0 + run.dt * (a - run.first);
                    complex ph = std::polar(1.0, -two_pi * sign * t_a * rho);
                    const complex step = run.dt == 0.0
                                             ? complex(1.0, 0.0)
                                             : std::polar(1.0, -two_pi * sign * run.dt * rho);
                    for (int k = a; k < b; ++k) {
                        complex* row =
                            acc.data()
                            + static_cast<std::size_t>(k - t_lo) * static_cast<std::size_t>(E);
                        for (int e = 0; e < E; ++e)
                            row[static_cast<std::size_t>(e)] += ph * amp[static_cast<std::size_t>(e)];
                        ph *= step;
                    }
                }
            }
            cb(j, t_lo, count, acc.data());
        }
    });
}

// ---------------------------------------------------------------------------
// Angular reduction helpers (shared with the estimate drivers)
// ---------------------------------------------------------------------------

namespace detail {

bool is_zonal(const ModeSet& data)
{
    for (const ModeEntry& e : data.entries)
        if (e.i != 0) return false;
    return true;
}

double zonal_basis(int n, int l, double c, double tau)
{
    switch (n) {
    case 2: return l == 0 ? 1.0 : std::sqrt(2.0) * std::cos(l * tau);
    case 3: return std::sqrt(2.0 * l + 1.0) * legendre_p(l, c);
    default: return chebyshev_u(l, c);
    }
}

PolarRule make_polar_rule(int n, int degree)
{
    PolarRule rule;
    rule.n = n;
    if (n == 2) {
        const int m = std::max(64, degree + 8);
        rule.x.resize(static_cast<std::size_t>(m));
        rule.w.assign(static_cast<std::size_t>(m), two_pi / m);
        for (int k = 0; k < m; ++k) rule.x[static_cast<std::size_t>(k)] = two_pi * k / m;
    } else if (n == 3) {
        const int m = std::max(24, (degree + 2) / 2 + 8);
        const QuadratureRule gl = gauss_legendre(m, -1.0, 1.0);
        rule.x = gl.nodes;
        rule.w = gl.weights;
        for (double& w : rule.w) w *= two_pi;
    } else {
        const int m = std::max(24, (degree + 2) / 2 + 8);
        rule.x.resize(static_cast<std::size_t>(m));
        rule.w.resize(static_cast<std::size_t>(m));
        for (int k = 1; k <= m; ++k) {
            const double th = pi * k / (m + 1);
            rule.x[static_cast<std::size_t>(k - 1)] = std::cos(th);
            const double s = std::sin(th);
            rule.w[static_cast<std::size_t>(k - 1)] = 4.0 * pi * pi / (m + 1) * s * s;
        }
        std::reverse(rule.x.begin(), rule.x.end());
        std::reverse(rule.w.begin(), rule.w.end());
    }
    return rule;
}

void ZonalTable::build(const ModeSet& data, int degree)
{
    rule = make_polar_rule(data.n, degree);
    entries = static_cast<int>(data.entries.size());
    degrees.resize(static_cast<std::size_t>(entries));
    for (int e = 0; e < entries; ++e)
        degrees[static_cast<std::size_t>(e)] = data.entries[static_cast<std::size_t>(e)].l;
    B.resize(rule.x.size() * static_cast<std::size_t>(entries));
    for (std::size_t a = 0; a < rule.x.size(); ++a)
        for (int e = 0; e < entries; ++e)
            B[a * static_cast<std::size_t>(entries) + static_cast<std::size_t>(e)] =
                zonal_basis(rule.n, degrees[static_cast<std::size_t>(e)], rule.x[a], rule.x[a]);
}

namespace {

// |sum_e v_e Y_{l_e}| at the polar coordinate x (tau for n=2, c otherwise).
double zonal_abs(int n, const std::vector<int>& degrees, const complex* v, double x)
{
    complex acc(0.0, 0.0);
    for (std::size_t e = 0; e < degrees.size(); ++e)
        acc += v[e] * zonal_basis(n, degrees[e], x, x);
    return std::abs(acc);
}

// Golden-section refinement of a bracketed polar maximum.
double golden_refine(int n, const std::vector<int>& degrees, const complex* v, double a,
                     double b, double seed_max)
{
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double best = seed_max;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = zonal_abs(n, degrees, v, x1);
    double f2 = zonal_abs(n, degrees, v, x2);
    for (int it = 0; it < 48 && (b - a) > 1e-12; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = zonal_abs(n, degrees, v, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = zonal_abs(n, degrees, v, x1);
        }
        best = std::max(best, std::max(f1, f2));
    }
    return best;
}

} // namespace

double zonal_sup(const ZonalTable& zt, const complex* v)
{
    const int n = zt.rule.n;
    const std::size_t m = zt.rule.x.size();
    double best = 0.0;
    int best_a = 0;
    for (std::size_t a = 0; a < m; ++a) {
        complex acc(0.0, 0.0);
        const double* row = zt.B.data() + a * static_cast<std::size_t>(zt.entries);
        for (int e = 0; e < zt.entries; ++e)
            acc += v[static_cast<std::size_t>(e)] * row[static_cast<std::size_t>(e)];
        const double ab = std::abs(acc);
        if (ab > best) {
            best = ab;
            best_a = static_cast<int>(a);
        }
    }
    if (m < 3) return best;
    // Interior Gauss nodes exclude the poles, where zonal waves concentrate.
    double lo_x = zt.rule.x[static_cast<std::size_t>(std::max(0, best_a - 1))];
    double hi_x = zt.rule.x[static_cast<std::size_t>(
        std::min(static_cast<int>(m) - 1, best_a + 1))];
    if (n >= 3) {
        const double at_north = zonal_abs(n, zt.degrees, v, 1.0);
        const double at_south = zonal_abs(n, zt.degrees, v, -1.0);
        if (at_north > best) {
            best = at_north;
            lo_x = zt.rule.x[m - 1];
            hi_x = 1.0;
        }
        if (at_south > best) {
            best = at_south;
            lo_x = -1.0;
            hi_x = zt.rule.x[0];
        }
    }
    return golden_refine(n, zt.degrees, v, lo_x, hi_x, best);
}

// ---------------------------------------------------------------------------
// Per-time norm traces
// ---------------------------------------------------------------------------

namespace {

// Generic-path basis matrix at the grid's angular nodes.
struct BasisTable {
    std::vector<double> B; // [node * entries + e]
    int entries = 0;

    void build(const ModeSet& data, const AngularQuadrature& quad)
    {
        entries = static_cast<int>(data.entries.size());
        const int L = data.max_degree();
        std::vector<double> flat;
        B.resize(quad.size() * static_cast<std::size_t>(entries));
        for (std::size_t a = 0; a < quad.size(); ++a) {
            eval_basis_all(data.n, L, quad.nodes[a], data.axis, flat);
            for (int e = 0; e < entries; ++e) {
                const ModeEntry& me = data.entries[static_cast<std::size_t>(e)];
                B[a * static_cast<std::size_t>(entries) + static_cast<std::size_t>(e)] =
                    flat[static_cast<std::size_t>(flat_offset(data.n, me.l) + me.i)];
            }
        }
    }
};

} // namespace

NormTrace norm_trace(const FieldSampler& fs, double r_exponent, const EvaluationGrid& grid,
                     int threads)
{
    const ModeSet& data = fs.data;
    const bool sup_in_x = std::isinf(r_exponent);
    const int E = static_cast<int>(data.entries.size());
    const int T = static_cast<int>(grid.time_nodes.size());
    const int cols = static_cast<int>(grid.radial_nodes.size());
    const bool zonal = is_zonal(data);
    ZonalTable zt;
    BasisTable bt;
    if (zonal)
        zt.build(data, grid.angular.exactness_degree);
    else
        bt.build(data, grid.angular);
    const double area = surface_area(grid.n);

    // Per-column rows of (angular reduction, captured mass), written
    // concurrently into disjoint slots.
    std::vector<int> lo(static_cast<std::size_t>(cols)), cnt(static_cast<std::size_t>(cols));
    std::vector<std::size_t> offset(static_cast<std::size_t>(cols) + 1, 0);
    for (int j = 0; j < cols; ++j) {
        active_time_range(grid, grid.radial_nodes[static_cast<std::size_t>(j)],
                          &lo[static_cast<std::size_t>(j)], &cnt[static_cast<std::size_t>(j)]);
        offset[static_cast<std::size_t>(j) + 1] =
            offset[static_cast<std::size_t>(j)]
            + static_cast<std::size_t>(std::max(0, cnt[static_cast<std::size_t>(j)]));
    }
    std::vector<double> cell_val(offset.back(), 0.0);
    std::vector<double> cell_mass(offset.back(), 0.0);

    scan_mode_columns(data, fs.time_sign, grid, threads,
                      [&](int j, int, int t_count, const complex* vals) {
                          for (int k = 0; k < t_count; ++k) {
                              const complex* v =
                                  vals + static_cast<std::size_t>(k) * static_cast<std::size_t>(E);
                              double mass = 0.0;
                              for (int e = 0; e < E; ++e)
                                  mass += std::norm(v[static_cast<std::size_t>(e)]);
                              double cell;
                              if (sup_in_x) {
                                  if (zonal) {
                                      cell = zonal_sup(zt, v);
                                  } else {
                                      double best = 0.0;
                                      const std::size_t m =
                                          bt.B.size() / static_cast<std::size_t>(E);
                                      for (std::size_t a = 0; a < m; ++a) {
                                          complex acc(0.0, 0.0);
                                          const double* row =
                                              bt.B.data() + a * static_cast<std::size_t>(E);
                                          for (int e = 0; e < E; ++e)
                                              acc += v[static_cast<std::size_t>(e)]
                                                     * row[static_cast<std::size_t>(e)];
                                          best = std::max(best, std::abs(acc));
                                      }
                                      cell = best;
                                  }
                              } else if (r_exponent == 2.0) {
                                  cell = area * mass; // Parseval on the sphere
                              } else {
                                  double acc_p = 0.0;
                                  const std::size_t m = zonal
                                                            ? zt.rule.x.size()
                                                            : bt.B.size() / static_cast<std::size_t>(E);
                                  const double* B = zonal ? zt.B.data() : bt.B.data();
                                  const double* w =
                                      zonal ? zt.rule.w.data() : grid.angular.weights.data();
                                  for (std::size_t a = 0; a < m; ++a) {
                                      complex acc(0.0, 0.0);
                                      const double* row = B + a * static_cast<std::size_t>(E);
                                      for (int e = 0; e < E; ++e)
                                          acc += v[static_cast<std::size_t>(e)]
                                                 * row[static_cast<std::size_t>(e)];
                                      acc_p += w[a] * std::pow(std::abs(acc), r_exponent);
                                  }
                                  cell = acc_p;
                              }
                              cell_val[offset[static_cast<std::size_t>(j)]
                                       + static_cast<std::size_t>(k)] = cell;
                              cell_mass[offset[static_cast<std::size_t>(j)]
                                        + static_cast<std::size_t>(k)] = mass;
                          }
                      });

    // Ordered assembly: bitwise deterministic for any thread count.
    NormTrace trace;
    trace.norm_t.assign(static_cast<std::size_t>(T), 0.0);
    trace.mass_t.assign(static_cast<std::size_t>(T), 0.0);
    for (int j = 0; j < cols; ++j) {
        const double r = grid.radial_nodes[static_cast<std::size_t>(j)];
        const double wr =
            grid.radial_weights[static_cast<std::size_t>(j)] * volume_factor(grid.n, r);
        for (int k = 0; k < cnt[static_cast<std::size_t>(j)]; ++k) {
            const int i = lo[static_cast<std::size_t>(j)] + k;
            const double cell =
                cell_val[offset[static_cast<std::size_t>(j)] + static_cast<std::size_t>(k)];
            if (sup_in_x)
                trace.norm_t[static_cast<std::size_t>(i)] =
                    std::max(trace.norm_t[static_cast<std::size_t>(i)], cell);
            else
                trace.norm_t[static_cast<std::size_t>(i)] += wr * cell;
            trace.mass_t[static_cast<std::size_t>(i)] +=
                wr * area
                * cell_mass[offset[static_cast<std::size_t>(j)] + static_cast<std::size_t>(k)];
        }
    }
    const double total_mass = data.l2_norm() * data.l2_norm();
    trace.min_mass_fraction = 1.0;
    for (int i = 0; i < T; ++i) {
        if (!sup_in_x)
            trace.norm_t[static_cast<std::size_t>(i)] = std::pow(
                std::max(0.0, trace.norm_t[static_cast<std::size_t>(i)]), 1.0 / r_exponent);
        if (total_mass > 0.0)
            trace.min_mass_fraction = std::min(
                trace.min_mass_fraction, trace.mass_t[static_cast<std::size_t>(i)] / total_mass);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Cube bins
// ---------------------------------------------------------------------------

void CubeBins::init(int n_, double side_, double radius)
{
    n = n_;
    side = side_;
    K = static_cast<int>(std::floor(radius / side + 0.5)) + 1;
    const std::size_t dim = static_cast<std::size_t>(2 * K + 1);
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= dim;
    if (total > (std::size_t{1} << 25))
        fail_invalid("dual_scale_norm: cube partition too fine for the sampled ball");
    mass.assign(total, 0.0);
}

void CubeBins::reset() { std::fill(mass.begin(), mass.end(), 0.0); }

std::size_t CubeBins::index(const double* x) const
{
    const std::size_t dim = static_cast<std::size_t>(2 * K + 1);
    std::size_t idx = 0;
    for (int d = 0; d < n; ++d) {
        int k = static_cast<int>(std::floor(x[d] / side + 0.5));
        k = std::max(-K, std::min(K, k));
        idx = idx * dim + static_cast<std::size_t>(k + K);
    }
    return idx;
}

double CubeBins::lp(double p) const
{
    if (std::isinf(p)) {
        double best = 0.0;
        for (double m : mass) best = std::max(best, m);
        return std::sqrt(best);
    }
    double acc = 0.0;
    for (double m : mass)
        if (m > 0.0) acc += std::pow(m, 0.5 * p);
    return std::pow(acc, 1.0 / p);
}

void bin_ring(CubeBins& bins, double r, double c, double w_mass, double mu)
{
    const double s = r * std::sqrt(std::max(0.0, 1.0 - c * c));
    const int n_phi = std::max(8, static_cast<int>(std::ceil(8.0 * pi * s * mu)));
    const double wm = w_mass / n_phi;
    const double z = r * c;
    // Incremental rotation around the ring (the field is axisymmetric, so any
    // uniform equal-weight offset splits the ring mass exactly; the recurrence
    // drift over a few thousand steps is far below the cube-assignment scale).
    const complex step = std::polar(1.0, two_pi / n_phi);
    complex dir = std::polar(1.0, pi / n_phi);
    for (int a = 0; a < n_phi; ++a) {
        const double x[3] = {s * dir.real(), s * dir.imag(), z};
        bins.add(x, wm);
        dir *= step;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public norms
// ---------------------------------------------------------------------------

namespace {

EvaluationGrid single_time_grid(const EvaluationGrid& g, double t)
{
    EvaluationGrid s;
    s.n = g.n;
    s.time_nodes = {t};
    s.time_weights = {1.0};
    s.radial_nodes = g.radial_nodes;
    s.radial_weights = g.radial_weights;
    s.angular = g.angular;
    s.mu = g.mu;
    return s;
}

} // namespace

double lr_norm(const FieldSampler& fs, double t, double r_exponent, const EvaluationGrid& grid,
               int threads)
{
    if (!(r_exponent >= 2.0)) fail_invalid("lr_norm: exponent must lie in [2, inf]");
    const EvaluationGrid s = single_time_grid(grid, t);
    return detail::norm_trace(fs, r_exponent, s, threads).norm_t[0];
}

double mixed_norm(const FieldSampler& fs, double q, double r_exponent,
                  const EvaluationGrid& grid, int threads, double* min_mass_fraction)
{
    if (!(q >= 1.0) || std::isinf(q)) fail_invalid("mixed_norm: q must be finite and >= 1");
    if (!(r_exponent >= 2.0)) fail_invalid("mixed_norm: exponent must lie in [2, inf]");
    grid.check();
    if (grid.time_nodes.size() < 2)
        fail_invalid("mixed_norm: the grid must carry a time window");
    const detail::NormTrace trace = detail::norm_trace(fs, r_exponent, grid, threads);
    if (min_mass_fraction) *min_mass_fraction = trace.min_mass_fraction;
    double qsum = 0.0;
    for (std::size_t i = 0; i < grid.time_nodes.size(); ++i)
        qsum += grid.time_weights[i] * std::pow(trace.norm_t[i], q);
    return std::pow(qsum, 1.0 / q);
}

double dual_scale_norm(const FieldSampler& fs, double t, double mu, double p,
                       const EvaluationGrid& grid, int threads)
{
    if (!(mu > 0.0) || mu > 1.0) fail_invalid("dual_scale_norm: mu must lie in (0, 1]");
    if (!(p >= 1.0)) fail_invalid("dual_scale_norm: p must lie in [1, inf]");
    if (grid.n == 4) fail_invalid("dual_scale_norm: cube partitions are for n in {2, 3}");
    const ModeSet& data = fs.data;
    const int E = static_cast<int>(data.entries.size());
    const EvaluationGrid s = single_time_grid(grid, t);
    const bool zonal = detail::is_zonal(data);
    const int L = data.max_degree();

    detail::CubeBins bins;
    bins.init(grid.n, 1.0 / mu, grid.max_radius() + 1.0);
    const int cols = static_cast<int>(s.radial_nodes.size());
    detail::ZonalTable zt;
    if (zonal && grid.n == 3)
        zt.build(data, std::max(grid.angular.exactness_degree, 2 * L + 16));
    // Collect per-column field values first (parallel), bin second (ordered).
    std::vector<std::vector<complex>> rows(static_cast<std::size_t>(cols));
    scan_mode_columns(data, fs.time_sign, s, threads,
                      [&](int j, int, int, const complex* vals) {
                          rows[static_cast<std::size_t>(j)].assign(vals, vals + E);
                      });

    for (int j = 0; j < cols; ++j) {
        const double r = s.radial_nodes[static_cast<std::size_t>(j)];
        const double wr = s.radial_weights[static_cast<std::size_t>(j)] * volume_factor(grid.n, r);
        const complex* v = rows[static_cast<std::size_t>(j)].data();
        if (grid.n == 3 && zonal) {
            for (std::size_t a = 0; a < zt.rule.x.size(); ++a) {
                complex acc(0.0, 0.0);
                const double* row = zt.B.data() + a * static_cast<std::size_t>(E);
                for (int e = 0; e < E; ++e)
                    acc += v[static_cast<std::size_t>(e)] * row[static_cast<std::size_t>(e)];
                detail::bin_ring(bins, r, zt.rule.x[a], wr * zt.rule.w[a] * std::norm(acc), mu);
            }
        } else if (grid.n == 3) {
            std::vector<double> flat;
            for (std::size_t a = 0; a < s.angular.size(); ++a) {
                eval_basis_all(data.n, L, s.angular.nodes[a], data.axis, flat);
                complex acc(0.0, 0.0);
                for (int e = 0; e < E; ++e) {
                    const ModeEntry& me = data.entries[static_cast<std::size_t>(e)];
                    acc += v[static_cast<std::size_t>(e)]
                           * flat[static_cast<std::size_t>(flat_offset(data.n, me.l) + me.i)];
                }
                const SpherePoint& om = s.angular.nodes[a];
                const double x[3] = {r * om[0], r * om[1], r * om[2]};
                bins.add(x, wr * s.angular.weights[a] * std::norm(acc));
            }
        } else {
            // n = 2: a circle grid fine enough for both the trig exactness of
            // |u|^2 and the cube boundaries.
            const int m =
                std::max({4 * L + 8, static_cast<int>(std::ceil(8.0 * pi * r * mu)), 64});
            for (int a = 0; a < m; ++a) {
                const double tau = two_pi * a / m;
                complex acc(0.0, 0.0);
                for (int e = 0; e < E; ++e) {
                    const ModeEntry& me = data.entries[static_cast<std::size_t>(e)];
                    const double basis =
                        me.i == 0 ? (me.l == 0 ? 1.0 : std::sqrt(2.0) * std::cos(me.l * tau))
                                  : std::sqrt(2.0) * std::sin(me.l * tau);
                    acc += v[static_cast<std::size_t>(e)] * basis;
                }
                const double x[2] = {r * std::cos(tau), r * std::sin(tau)};
                bins.add(x, wr * (two_pi / m) * std::norm(acc));
            }
        }
    }
    return bins.lp(p);
}

// ---------------------------------------------------------------------------
// Sampled-field norm variants (oracle path)
// ---------------------------------------------------------------------------

namespace {

double sampled_lr_at(const SampledField& field, double t, double r_exp,
                     const EvaluationGrid& g)
{
    const bool sup = std::isinf(r_exp);
    double acc = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < g.radial_nodes.size(); ++j) {
        const double r = g.radial_nodes[j];
        const double wr = g.radial_weights[j] * volume_factor(g.n, r);
        for (std::size_t a = 0; a < g.angular.size(); ++a) {
            const double ab = std::abs(field(t, r, g.angular.nodes[a]));
            if (sup)
                best = std::max(best, ab);
            else
                acc += wr * g.angular.weights[a] * std::pow(ab, r_exp);
        }
    }
    return sup ? best : std::pow(acc, 1.0 / r_exp);
}

} // namespace

double sampled_lr_norm(const SampledField& field, double t, double r_exponent,
                       const EvaluationGrid& grid)
{
    if (!(r_exponent >= 2.0)) fail_invalid("sampled_lr_norm: exponent must lie in [2, inf]");
    grid.check();
    return sampled_lr_at(field, t, r_exponent, grid);
}

double sampled_mixed_norm(const SampledField& field, double q, double r_exponent,
                          const EvaluationGrid& grid)
{
    if (!(q >= 1.0) || std::isinf(q))
        fail_invalid("sampled_mixed_norm: q must be finite and >= 1");
    grid.check();
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.time_nodes.size(); ++i)
        acc += grid.time_weights[i]
               * std::pow(sampled_lr_at(field, grid.time_nodes[i], r_exponent, grid), q);
    return std::pow(acc, 1.0 / q);
}

double sampled_dual_scale_norm(const SampledField& field, double t, double mu, double p,
                               const EvaluationGrid& grid)
{
    if (!(mu > 0.0) || mu > 1.0) fail_invalid("sampled_dual_scale_norm: mu must lie in (0, 1]");
    if (!(p >= 1.0)) fail_invalid("sampled_dual_scale_norm: p must lie in [1, inf]");
    if (grid.n == 4)
        fail_invalid("sampled_dual_scale_norm: cube partitions are for n in {2, 3}");
    grid.check();
    detail::CubeBins bins;
    bins.init(grid.n, 1.0 / mu, grid.max_radius() + 1.0);
    for (std::size_t j = 0; j < grid.radial_nodes.size(); ++j) {
        const double r = grid.radial_nodes[j];
        const double wr = grid.radial_weights[j] * volume_factor(grid.n, r);
        for (std::size_t a = 0; a < grid.angular.size(); ++a) {
            const SpherePoint& om = grid.angular.nodes[a];
            const double ab2 = std::norm(field(t, r, om));
            const double x[4] = {r * om[0], r * om[1], r * om[2], r * om[3]};
            bins.add(x, wr * grid.angular.weights[a] * ab2);
        }
    }
    return bins.lp(p);
}

double hs_omega_data_norm(const ModeSet& data, double s)
{
    const std::vector<double> masses = data.mode_masses();
    double acc = 0.0;
    for (std::size_t e = 0; e < masses.size(); ++e) {
        const int l = data.entries[e].l;
        if (l == 0 && s < 0.0 && masses[e] > 0.0)
            fail_invalid("hs_omega_data_norm: negative s rejects degree-0 mass");
        const double lam = eigenvalue(data.n, l);
        acc += (1.0 + std::pow(lam, s)) * masses[e];
    }
    return std::sqrt(surface_area(data.n) * acc);
}

// ---------------------------------------------------------------------------
// Least-squares fits
// ---------------------------------------------------------------------------

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        fail_invalid("fit_loglog: need matching inputs with at least 2 points");
    const std::size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(m), ly(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) fail_invalid("fit_loglog: inputs must be positive");
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
        sx += lx[k];
        sy += ly[k];
        sxx += lx[k] * lx[k];
        sxy += lx[k] * ly[k];
    }
    const double d = static_cast<double>(m) * sxx - sx * sx;
    FitResult fit;
    if (std::abs(d) < 1e-14 * (1.0 + sxx)) fail_invalid("fit_loglog: degenerate abscissae");
    fit.slope = (static_cast<double>(m) * sxy - sx * sy) / d;
    fit.intercept = (sy - fit.slope * sx) / static_cast<double>(m);
    const double mean = sy / static_cast<double>(m);
    double ss_res = 0, ss_tot = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double e = ly[k] - (fit.intercept + fit.slope * lx[k]);
        ss_res += e * e;
        ss_tot += (ly[k] - mean) * (ly[k] - mean);
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(e));
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

BilinearFit fit_bilinear(const std::vector<double>& x1, const std::vector<double>& x2,
                         const std::vector<double>& y)
{
    const std::size_t m = y.size();
    if (x1.size() != m || x2.size() != m || m < 3)
        fail_invalid("fit_bilinear: need matching inputs with at least 3 points");
    std::vector<double> u(m), v(m), w(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (!(x1[k] > 0.0) || !(x2[k] > 0.0) || !(y[k] > 0.0))
            fail_invalid("fit_bilinear: inputs must be positive");
        u[k] = std::log(x1[k]);
        v[k] = std::log(x2[k]);
        w[k] = std::log(y[k]);
    }
    // Normal equations for w ~ a u + b v + c.
    double Suu = 0, Suv = 0, Svv = 0, Su = 0, Sv = 0, Sw = 0, Suw = 0, Svw = 0;
    for (std::size_t k = 0; k < m; ++k) {
        Suu += u[k] * u[k];
        Suv += u[k] * v[k];
        Svv += v[k] * v[k];
        Su += u[k];
        Sv += v[k];
        Sw += w[k];
        Suw += u[k] * w[k];
        Svw += v[k] * w[k];
    }
    const double M[3][3] = {{Suu, Suv, Su}, {Suv, Svv, Sv}, {Su, Sv, static_cast<double>(m)}};
    const double rhs[3] = {Suw, Svw, Sw};
    const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
                       - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
                       + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    if (std::abs(det) < 1e-12 * (1.0 + Suu) * (1.0 + Svv))
        fail_invalid("fit_bilinear: degenerate design (vary both parameters)");
    auto solve = [&](int col) {
        double A[3][3];
        std::memcpy(A, M, sizeof A);
        for (int row = 0; row < 3; ++row) A[row][col] = rhs[row];
        return (A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
                - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
                + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]))
               / det;
    };
    BilinearFit fit;
    fit.a = solve(0);
    fit.b = solve(1);
    fit.intercept = solve(2);
    const double mean = Sw / static_cast<double>(m);
    double ss_res = 0, ss_tot = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double e = w[k] - (fit.a * u[k] + fit.b * v[k] + fit.intercept);
        ss_res += e * e;
        ss_tot += (w[k] - mean) * (w[k] - mean);
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(e));
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    default: return "NOT_APPLICABLE";
    }
}

namespace {

void print_num(std::ostream& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

} // namespace

void EstimateReport::to_csv(std::ostream& out) const
{
    out << "name,N,eps,mu,eta,r,q,T,seed,value,reference\n";
    for (const ScanPoint& p : points) {
        out << name << ',';
        print_num(out, p.N);
        out << ',';
        print_num(out, p.eps);
        out << ',';
        print_num(out, p.mu);
        out << ',';
        print_num(out, p.eta);
        out << ',';
        print_num(out, p.r_exponent);
        out << ',';
        print_num(out, p.q);
        out << ',';
        print_num(out, p.T);
        out << ',' << p.seed << ',';
        print_num(out, p.value);
        out << ',';
        print_num(out, p.reference);
        out << '\n';
    }
}

void EstimateReport::summary(std::ostream& out) const
{
    out << "{\"name\":\"" << name << "\",\"slope\":";
    print_num(out, slope);
    out << ",\"slope_b\":";
    print_num(out, slope_b);
    out << ",\"intercept\":";
    print_num(out, intercept);
    out << ",\"r_squared\":";
    print_num(out, r_squared);
    out << ",\"max_abs_residual\":";
    print_num(out, max_abs_residual);
    out << ",\"threshold\":";
    print_num(out, threshold);
    out << ",\"measured\":";
    print_num(out, measured);
    out << ",\"verdict\":\"" << verdict_name(verdict) << "\",\"seeds\":[";
    for (std::size_t k = 0; k < seeds.size(); ++k) out << (k ? "," : "") << seeds[k];
    out << "],\"grid_hash\":\"";
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(grid_hash));
    out << buf << "\",\"remark\":\"" << remark << "\"}\n";
}

Verdict slope_verdict(bool slope_ok, double r_squared, double max_abs_residual,
                      double near_zero_band)
{
    if (r_squared < 0.9 && max_abs_residual > near_zero_band) return Verdict::inconclusive;
    return slope_ok ? Verdict::pass : Verdict::fail;
}

// ---------------------------------------------------------------------------
// Morawetz weight calculus
// ---------------------------------------------------------------------------

double MorawetzWeight::f(double r) const { return constant_f ? 1.0 : r / (eps + r); }

double MorawetzWeight::f_prime(double r) const
{
    return constant_f ? 0.0 : eps / ((eps + r) * (eps + r));
}

double MorawetzWeight::tr_pi(double r) const { return f_prime(r) + (n - 1) * f(r) / r; }

double MorawetzWeight::tr_pi_prime(double r) const
{
    if (constant_f) return -(n - 1.0) / (r * r);
    const double s = eps + r;
    return -2.0 * eps / (s * s * s) - (n - 1.0) / (s * s);
}

double MorawetzWeight::tr_pi_laplacian(double r) const
{
    if (constant_f) return (n - 1.0) * (3.0 - n) / (r * r * r);
    const double s = eps + r;
    const double num = (n - 1.0) * (n - 3.0) * r * r + 2.0 * (n * n - 2.0 * n - 2.0) * eps * r
                       + (n - 1.0) * (n + 1.0) * eps * eps;
    return -num / (r * s * s * s * s);
}

double MorawetzWeight::tr_pi_laplacian_termwise(double r) const
{
    if (constant_f) return (n - 1.0) * (3.0 - n) / (r * r * r);
    const double s = eps + r;
    const double bracket =
        (n - 3.0) * r + 3.0 * (n - 3.0) * eps * r / s + 3.0 * eps * eps * (n - 1.0) / s;
    return -bracket / (r * s * s * s);
}

double morawetz_negativity_scan(int n, double eps, const std::vector<double>& r_grid)
{
    if (n < 3 || n > 4) fail_invalid("morawetz_negativity_scan: n must be 3 or 4");
    if (!(eps > 0.0)) fail_invalid("morawetz_negativity_scan: eps must be positive");
    if (r_grid.empty()) fail_invalid("morawetz_negativity_scan: empty grid");
    MorawetzWeight w;
    w.n = n;
    w.eps = eps;
    double best = -inf;
    for (double r : r_grid) {
        if (!(r > 0.0)) fail_invalid("morawetz_negativity_scan: radii must be positive");
        best = std::max(best, std::max(w.tr_pi_laplacian(r), w.tr_pi_laplacian_termwise(r)));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Energy-momentum divergence identity
// ---------------------------------------------------------------------------

namespace {

double zonal_basis_dtheta(int n, int l, double theta)
{
    if (l == 0) return 0.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    switch (n) {
    case 2: return -std::sqrt(2.0) * l * std::sin(l * theta);
    case 3: {
        // d/dtheta sqrt(2l+1) P_l(cos theta) = -sin(theta) sqrt(2l+1) P_l'(c),
        // P_l'(c) = l (P_{l-1} - c P_l) / (1 - c^2).
        const double den = 1.0 - c * c;
        if (den < 1e-12) return 0.0;
        const double pl = legendre_p(l, c);
        const double plm = legendre_p(l - 1, c);
        return -s * std::sqrt(2.0 * l + 1.0) * l * (plm - c * pl) / den;
    }
    default:
        // d/dc U_l = 2 C_{l-1}^{(2)}; d/dtheta = -sin(theta) d/dc.
        return -s * 2.0 * gegenbauer(l - 1, 2.0, c);
    }
}

// phi = Re u and its first derivatives for axisymmetric data at (t, r, theta);
// frozen pins the field to the sample's own time (a non-solution control).
struct ZonalField {
    const FieldSampler* fs = nullptr;
    bool frozen = false;
    double t_freeze = 0.0;

    void eval(double t, double r, double theta, double* phi, double* phi_t, double* phi_r,
              double* phi_th) const
    {
        const double te = frozen ? t_freeze : t;
        const double c = std::cos(theta);
        complex u(0.0, 0.0), ut(0.0, 0.0), ur(0.0, 0.0), uth(0.0, 0.0);
        for (std::size_t e = 0; e < fs->data.entries.size(); ++e) {
            const ModeEntry& me = fs->data.entries[e];
            if (me.i != 0)
                fail_invalid("verify_energy_momentum_identity: axisymmetric data required");
            const double Y = detail::zonal_basis(fs->data.n, me.l, c, theta);
            const double dY = zonal_basis_dtheta(fs->data.n, me.l, theta);
            const complex v = fs->mode_value(e, te, r);
            u += v * Y;
            ur += fs->mode_dr(e, te, r) * Y;
            uth += v * dY;
            if (!frozen) ut += fs->mode_dt(e, te, r) * Y;
        }
        *phi = u.real();
        *phi_t = ut.real();
        *phi_r = ur.real();
        *phi_th = uth.real();
    }
};

struct Momentum {
    double pt = 0.0;  // P~_t
    double pr = 0.0;  // P~_r
    double pth = 0.0; // P~_theta (covariant angular component)
};

Momentum momentum_at(const ZonalField& zf, const MorawetzWeight& w, double t, double r,
                     double theta)
{
    double phi, phi_t, phi_r, phi_th;
    zf.eval(t, r, theta, &phi, &phi_t, &phi_r, &phi_th);
    const double f = w.f(r);
    const double tp = w.tr_pi(r);
    const double ang = phi_th / r;
    Momentum m;
    m.pt = 0.5 * f * phi_t * phi_r + 0.25 * tp * phi * phi_t;
    m.pr = 0.25 * f * (phi_t * phi_t + phi_r * phi_r - ang * ang) + 0.25 * tp * phi * phi_r
           - 0.125 * w.tr_pi_prime(r) * phi * phi;
    m.pth = 0.5 * f * phi_th * phi_r + 0.25 * tp * phi * phi_th;
    return m;
}

} // namespace

double verify_energy_momentum_identity(const FieldSampler& fs,
                                       const std::vector<std::array<double, 3>>& points,
                                       const MorawetzWeight& weight, bool freeze_time)
{
    if (points.empty()) fail_invalid("verify_energy_momentum_identity: no sample points");
    if (fs.data.n != weight.n)
        fail_invalid("verify_energy_momentum_identity: weight dimension mismatch");
    // Stencil width: products of modes oscillate at frequencies up to
    // 8 pi, so the fourth-order truncation is ~(8 pi h)^4/30 of the flux
    // scale; 1/256 puts it near 1e-6 while the per-evaluation quadrature
    // noise (~1e-9 relative, divided by h) stays a decade below that.
    const double h = 1.0 / 256.0;
    const int n = fs.data.n;

    // First pass: local energy densities (the relative-residual floor).
    ZonalField plain;
    plain.fs = &fs;
    std::vector<double> density(points.size());
    double peak = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double t = points[k][0];
        const double r = points[k][1];
        const double theta = points[k][2];
        if (r < 0.5)
            fail_invalid("verify_energy_momentum_identity: sample radii must be >= 0.5");
        double phi, phi_t, phi_r, phi_th;
        plain.eval(t, r, theta, &phi, &phi_t, &phi_r, &phi_th);
        density[k] = 0.25 * (phi_t * phi_t + phi_r * phi_r + (phi_th / r) * (phi_th / r));
        peak = std::max(peak, density[k]);
    }
    if (peak <= 0.0) fail_invalid("verify_energy_momentum_identity: field vanishes at samples");

    double worst = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double t = points[k][0];
        const double r = points[k][1];
        const double theta = points[k][2];
        ZonalField field;
        field.fs = &fs;
        field.frozen = freeze_time;
        field.t_freeze = t;

        // Fourth-order central differences of the three flux components.
        auto pt_at = [&](double tt) { return momentum_at(field, weight, tt, r, theta).pt; };
        auto pr_at = [&](double rr) {
            return momentum_at(field, weight, t, rr, theta).pr * std::pow(rr, n - 1);
        };
        auto pth_at = [&](double th) {
            return momentum_at(field, weight, t, r, th).pth
                   * std::pow(std::sin(th), n - 2);
        };
        const double dpt =
            (-pt_at(t + 2 * h) + 8 * pt_at(t + h) - 8 * pt_at(t - h) + pt_at(t - 2 * h))
            / (12 * h);
        const double dpr =
            (-pr_at(r + 2 * h) + 8 * pr_at(r + h) - 8 * pr_at(r - h) + pr_at(r - 2 * h))
            / (12 * h) / std::pow(r, n - 1);
        const double s = std::sin(theta);
        const double dpth = (-pth_at(theta + 2 * h) + 8 * pth_at(theta + h)
                             - 8 * pth_at(theta - h) + pth_at(theta - 2 * h))
                            / (12 * h) / (r * r * std::pow(s, n - 2));
        const double lhs = -dpt + dpr + dpth;

        double phi, phi_t, phi_r, phi_th;
        field.eval(t, r, theta, &phi, &phi_t, &phi_r, &phi_th);
        const double ang = phi_th / r;
        const double rhs = 0.5 * weight.f_prime(r) * phi_r * phi_r
                           + 0.5 * (weight.f(r) / r) * ang * ang
                           - 0.125 * weight.tr_pi_laplacian(r) * phi * phi;
        const double denom = std::max(density[k], 1e-3 * peak);
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    return worst;
}

} // namespace wplab
