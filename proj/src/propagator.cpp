// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "wplab/cutoffs.hpp"
#include "wplab/rng.hpp"
#include "wplab/specfun.hpp"

namespace wplab {

namespace {

constexpr double band_lo = 0.25, band_hi = 4.0;     // sampling interval
constexpr double support_lo = 0.5, support_hi = 2.0; // unit-frequency shell

int panels_for_scale(double feature_scale)
{
    if (!(feature_scale > 0.0)) fail_invalid("profile feature scale must be positive");
    return std::max(12, static_cast<int>(std::ceil((band_hi - band_lo) / feature_scale)));
}

} // namespace

RadialProfile make_profile(std::function<complex(double)> fn, double feature_scale, bool unit_band)
{
    RadialProfile p;
    p.fn = std::move(fn);
    p.unit_band = unit_band;
    p.feature_scale = feature_scale;
    p.rule = composite_gauss(32, panels_for_scale(feature_scale), band_lo, band_hi);
    p.values.resize(p.rule.size());
    double peak = 0.0;
    for (std::size_t q = 0; q < p.rule.size(); ++q) {
        p.values[q] = p.fn(p.rule.nodes[q]);
        peak = std::max(peak, std::abs(p.values[q]));
    }
    if (unit_band) {
        // The support invariant: nothing outside (1/2, 2).
        for (int k = 0; k <= 128; ++k) {
            const double lo = band_lo + (support_lo - band_lo) * k / 128.0;
            const double hi = support_hi + (band_hi - support_hi) * k / 128.0;
            if (std::abs(p.fn(lo)) > 1e-10 * (1.0 + peak)
                || std::abs(p.fn(hi)) > 1e-10 * (1.0 + peak))
                fail_invalid("radial profile leaks outside the unit-frequency shell (1/2, 2)");
        }
    }
    return p;
}

int ModeSet::max_degree() const
{
    int top = 0;
    for (const ModeEntry& e : entries) top = std::max(top, e.l);
    return top;
}

std::vector<double> ModeSet::mode_masses() const
{
    std::vector<double> masses;
    masses.reserve(entries.size());
    for (const ModeEntry& e : entries) {
        double acc = 0.0;
        for (std::size_t q = 0; q < e.profile.rule.size(); ++q)
            acc += e.profile.rule.weights[q] * std::norm(e.profile.values[q])
                   * std::pow(e.profile.rule.nodes[q], n - 1);
        masses.push_back(acc);
    }
    return masses;
}

double ModeSet::l2_norm() const
{
    double total = 0.0;
    for (double m : mode_masses()) total += m;
    return std::sqrt(surface_area(n) * total);
}

void ModeSet::scale(double factor)
{
    for (ModeEntry& e : entries) {
        auto inner = e.profile.fn;
        e.profile.fn = [inner, factor](double rho) { return factor * inner(rho); };
        for (complex& v : e.profile.values) v *= factor;
    }
}

void ModeSet::check_invariants() const
{
    for (const ModeEntry& e : entries) {
        if (e.l < 0 || e.i < 0 || e.i >= basis_slots(n, e.l))
            fail_invalid("mode set contains an invalid harmonic index");
    }
    if (N_loc > 0) {
        const std::vector<double> masses = mode_masses();
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const bool inside = entries[k].l > N_loc / 2 && entries[k].l < 4 * N_loc;
            if (!inside && masses[k] > 1e-20)
                fail_invalid("angularly localized data carries mass outside (N/2, 4N)");
        }
    }
}

// ---------------------------------------------------------------------------
// Mode evolution
// ---------------------------------------------------------------------------

namespace {

complex hankel_integral(const HarmonicIndex& idx, const RadialProfile& p, double t, double r,
                        int time_deriv)
{
    const int n = idx.n, l = idx.l;
    const BesselOrder ord = BesselOrder::for_dimension(n, l);
    const double half_n = 0.5 * n;
    auto amplitude = [&](double rho) {
        complex a = p.fn(rho) * (bessel_j_fast(ord, two_pi * r * rho) * std::pow(rho, half_n));
        if (time_deriv) a *= complex(0.0, -two_pi * rho);
        return a;
    };
    const complex I = oscillatory_integrate(amplitude, -t, p.rule, 1e-10, r);
    return two_pi * unit_imag_pow(l) * std::pow(r, 0.5 * (2 - n)) * I;
}

complex hankel_small_r(const HarmonicIndex& idx, const RadialProfile& p, double t, double r,
                       int time_deriv)
{
    const int n = idx.n, l = idx.l;
    const double radial_power = std::pow(r, static_cast<double>(l));
    if (radial_power == 0.0) return complex(0.0, 0.0);
    const double nu = 0.5 * (n - 2) + l;
    const double inv_gamma = 1.0 / std::tgamma(nu + 1.0);
    auto amplitude = [&](double rho) {
        // Three-term small-argument expansion of the oscillatory kernel: the
        // apparent r^{(2-n)/2} singularity cancels against the kernel's
        // leading power, leaving a clean r^l prefactor.
        const double z = pi * r * rho;
        const double zz = z * z;
        const double corr = 1.0 - zz / (nu + 1.0) + zz * zz / (2.0 * (nu + 1.0) * (nu + 2.0));
        complex a = p.fn(rho) * (std::pow(pi * rho, nu) * inv_gamma * corr * std::pow(rho, 0.5 * n));
        if (time_deriv) a *= complex(0.0, -two_pi * rho);
        return a;
    };
    const complex I = oscillatory_integrate(amplitude, -t, p.rule, 1e-10, 0.0);
    return two_pi * unit_imag_pow(l) * radial_power * I;
}

void check_mode_args(const HarmonicIndex& idx, double r)
{
    if (idx.n < 2 || idx.n > 4 || idx.l < 0) fail_invalid("invalid harmonic index");
    if (!(r >= 0.0)) fail_invalid("radius must be >= 0");
}

} // namespace

complex hankel_mode(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r)
{
    check_mode_args(idx, r);
    if (r < 1e-3) return hankel_small_r(idx, profile, t, r, 0);
    return hankel_integral(idx, profile, t, r, 0);
}

complex hankel_mode_dt(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r)
{
    check_mode_args(idx, r);
    if (r < 1e-3) return hankel_small_r(idx, profile, t, r, 1);
    return hankel_integral(idx, profile, t, r, 1);
}

complex hankel_mode_dr(const HarmonicIndex& idx, const RadialProfile& profile, double t, double r)
{
    check_mode_args(idx, r);
    if (r < 0.1) fail_invalid("analytic radial derivative requires r >= 0.1");
    const int n = idx.n, l = idx.l;
    const BesselOrder ord = BesselOrder::for_dimension(n, l);
    const double half_n = 0.5 * n;
    const double prefac_power = 0.5 * (2 - n);
    // Quadrature of (d/dr of the kernel) against the profile.
    auto amplitude = [&](double rho) {
        const double x = two_pi * r * rho;
        const double j = bessel_j_fast(ord, x);
        // d/dx J_nu = (J_{nu-1} - J_{nu+1}) / 2, with J_0' = -J_1.
        double jprime;
        if (ord.twice_order == 0) {
            jprime = -bessel_j_fast(BesselOrder(2), x);
        } else {
            jprime = 0.5
                     * (bessel_j_fast(BesselOrder(ord.twice_order - 2), x)
                        - bessel_j_fast(BesselOrder(ord.twice_order + 2), x));
        }
        const double bracket = prefac_power / r * j + two_pi * rho * jprime;
        return profile.fn(rho) * (bracket * std::pow(rho, half_n));
    };
    const complex I = oscillatory_integrate(amplitude, -t, profile.rule, 1e-10, r);
    return two_pi * unit_imag_pow(l) * std::pow(r, prefac_power) * I;
}

complex FieldSampler::mode_value(std::size_t entry, double t, double r) const
{
    const ModeEntry& e = data.entries.at(entry);
    return hankel_mode({data.n, e.l, e.i}, e.profile, time_sign > 0 ? t : -t, r);
}

complex FieldSampler::mode_dt(std::size_t entry, double t, double r) const
{
    const ModeEntry& e = data.entries.at(entry);
    const double sign = time_sign > 0 ? 1.0 : -1.0;
    return sign * hankel_mode_dt({data.n, e.l, e.i}, e.profile, sign * t, r);
}

complex FieldSampler::mode_dr(std::size_t entry, double t, double r) const
{
    const ModeEntry& e = data.entries.at(entry);
    return hankel_mode_dr({data.n, e.l, e.i}, e.profile, time_sign > 0 ? t : -t, r);
}

complex FieldSampler::evaluate(double t, double r, const SpherePoint& omega) const
{
    return evaluate_field(*this, t, r, omega);
}

complex evaluate_field(const FieldSampler& fs, double t, double r, const SpherePoint& omega)
{
    std::vector<double> basis;
    eval_basis_all(fs.data.n, fs.data.max_degree(), omega, fs.data.axis, basis);
    complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < fs.data.entries.size(); ++k) {
        const ModeEntry& e = fs.data.entries[k];
        acc += fs.mode_value(k, t, r) * basis[flat_offset(fs.data.n, e.l) + e.i];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

ModeSet make_radial_bump(int n)
{
    ModeSet d;
    d.n = n;
    d.axis = default_axis(n);
    d.label = "radial-bump";
    ModeEntry e;
    e.l = 0;
    e.i = 0;
    e.profile = make_profile([](double rho) { return complex(unit_band_bump(rho), 0.0); }, 0.25);
    d.entries.push_back(e);
    d.check_invariants();
    return d;
}

ModeSet make_random_localized(int n, int N, std::uint64_t seed, int L_max, bool zonal)
{
    if (N < 2) fail_invalid("angular localization N must be a dyadic integer >= 2");
    if (N > L_max / 4)
        fail_invalid("angular localization exceeds L_max/4; raise L_max or lower N");
    ModeSet d;
    d.n = n;
    d.N_loc = N;
    d.axis = default_axis(n);
    d.seed = seed;
    d.label = zonal ? "random-localized-zonal" : "random-localized";
    constexpr int K_rand = 8;
    for (int l = N + 1; l <= 2 * N - 1; ++l) {
        const int slots = zonal ? 1 : basis_slots(n, l);
        for (int i = 0; i < slots; ++i) {
            auto coef = std::make_shared<std::vector<complex>>();
            coef->reserve(2 * K_rand + 1);
            const std::uint64_t stream = static_cast<std::uint64_t>(l) * 4096u
                                         + static_cast<std::uint64_t>(i) + 1u;
            for (int k = -K_rand; k <= K_rand; ++k)
                coef->push_back(complex_gauss(seed, stream, static_cast<std::uint64_t>(k + K_rand))
                                / std::sqrt(2.0 * K_rand + 1.0));
            ModeEntry e;
            e.l = l;
            e.i = i;
            e.profile = make_profile(
                [coef](double rho) {
                    // Random trigonometric polynomial on the band, period 4.
                    const complex w = std::exp(complex(0.0, 0.5 * pi * rho));
                    complex acc(0.0, 0.0);
                    complex wk = std::pow(w, -K_rand);
                    for (int k = 0; k < static_cast<int>(coef->size()); ++k) {
                        acc += (*coef)[k] * wk;
                        wk *= w;
                    }
                    return complex(unit_band_bump(rho), 0.0) * acc;
                },
                0.2);
            d.entries.push_back(e);
        }
    }
    const double norm = d.l2_norm();
    d.scale(1.0 / norm);
    d.check_invariants();
    return d;
}

double knapp_mollification(double eps) { return eps / 8.0; }

namespace {

// Zonal projection of the mollified Knapp plate, memoized per radial node.
// One row holds the coefficients of every degree 0..L_ext at a fixed rho.
// The polar integral runs only over the plate's angular support window with
// panels sized by the mollified edge width delta/rho: the mollifier is a
// Gevrey-class (not analytic) function, so fixed global rules converge too
// slowly, while edge-resolving composite Gauss panels reach ~1e-10.
struct KnappCache {
    int n = 4;
    int L_ext = 0;
    double eps = 0.25;
    double delta = 1.0 / 32.0;
    double xi1_hi = 2.0;
    std::unordered_map<std::uint64_t, std::vector<double>> rows;
    std::mutex lock;

    KnappCache(int n_, double eps_, int L_ext_) : n(n_), L_ext(L_ext_), eps(eps_)
    {
        delta = knapp_mollification(eps);
        xi1_hi = 2.0 - eps * eps / 8.0;
    }

    double plate(double rho, double c, double s) const
    {
        const double perp = rho * std::abs(s);
        if (perp >= 0.5 * eps) return 0.0;
        const double g1 = plateau_bump(rho * c, 0.5, 0.5 + delta, xi1_hi - delta, xi1_hi);
        if (g1 == 0.0) return 0.0;
        return g1 * smooth_ramp((0.5 * eps - perp) / delta);
    }

    const std::vector<double>& row(double rho)
    {
        std::uint64_t key;
        static_assert(sizeof key == sizeof rho);
        std::memcpy(&key, &rho, sizeof key);
        std::lock_guard<std::mutex> guard(lock);
        auto it = rows.find(key);
        if (it != rows.end()) return it->second;
        std::vector<double> out(L_ext + 1, 0.0);

        // Angular support: rho cos(theta) in (1/2, xi1_hi), rho sin(theta)
        // in [0, eps/2).
        double th_lo = 0.0, th_hi = 0.0;
        if (rho > 0.5) {
            const double c_hi = std::min(1.0, xi1_hi / rho);
            const double c_lo = std::min(1.0, 0.5 / rho);
            const double s_hi = std::min(1.0, 0.5 * eps / rho);
            th_lo = std::acos(c_hi);
            th_hi = std::min(std::acos(c_lo), std::asin(s_hi));
        }
        if (th_hi > th_lo) {
            const int panels
                = 4 + static_cast<int>(std::ceil((th_hi - th_lo) * 8.0 * rho / delta));
            const QuadratureRule th_rule = composite_gauss(16, panels, th_lo, th_hi);
            std::vector<double> basis(L_ext + 1);
            for (std::size_t q = 0; q < th_rule.size(); ++q) {
                const double th = th_rule.nodes[q];
                const double c = std::cos(th), s = std::sin(th);
                const double f = plate(rho, c, s);
                if (f == 0.0) continue;
                double w = th_rule.weights[q] * f;
                if (n == 4) {
                    // (2/pi) sin^2(theta) weight; zonal basis U_l(c).
                    w *= (2.0 / pi) * s * s;
                    double prev = 1.0, cur = 2.0 * c;
                    basis[0] = 1.0;
                    for (int l = 1; l <= L_ext; ++l) {
                        basis[l] = cur;
                        const double next = 2.0 * c * cur - prev;
                        prev = cur;
                        cur = next;
                    }
                } else if (n == 3) {
                    // (1/2) sin(theta) weight; basis sqrt(2l+1) P_l(c).
                    w *= 0.5 * s;
                    double prev = 1.0, cur = c;
                    basis[0] = 1.0;
                    if (L_ext >= 1) basis[1] = std::sqrt(3.0) * c;
                    for (int l = 2; l <= L_ext; ++l) {
                        const double next = ((2.0 * l - 1.0) * c * cur - (l - 1.0) * prev) / l;
                        prev = cur;
                        cur = next;
                        basis[l] = std::sqrt(2.0 * l + 1.0) * next;
                    }
                } else {
                    // Both half-circles via evenness; basis sqrt(2) cos(l th).
                    w *= 1.0 / pi;
                    double prev = 1.0, cur = c; // cos(l th) = T_l(c)
                    basis[0] = 1.0;
                    for (int l = 1; l <= L_ext; ++l) {
                        basis[l] = std::sqrt(2.0) * cur;
                        const double next = 2.0 * c * cur - prev;
                        prev = cur;
                        cur = next;
                    }
                }
                for (int l = 0; l <= L_ext; ++l) out[l] += w * basis[l];
            }
        }
        return rows.emplace(key, std::move(out)).first->second;
    }
};

} // namespace

ModeSet make_knapp(int n, double eps, int L_max)
{
    if (n < 2 || n > 4) fail_invalid("knapp data is available for n in {2,3,4}");
    if (!(eps > 0.0 && eps <= 0.5)) fail_invalid("knapp width eps must lie in (0, 1/2]");
    if (eps < 4.0 / L_max)
        fail_invalid("knapp width eps is below the resolvable floor 4/L_max for this L_max");

    const int L = static_cast<int>(std::lround(4.0 / eps));
    const int L_ext = L + 8;
    auto cache = std::make_shared<KnappCache>(n, eps, L_ext);

    ModeSet d;
    d.n = n;
    d.axis = default_axis(n);
    SpherePoint e1{};
    e1[0] = 1.0;
    d.axis = e1; // the plate is axisymmetric about the first coordinate axis
    d.label = "knapp";
    for (int l = 0; l <= L; ++l) {
        ModeEntry e;
        e.l = l;
        e.i = 0;
        e.profile = make_profile(
            [cache, l](double rho) { return complex(cache->row(rho)[l], 0.0); },
            knapp_mollification(eps));
        d.entries.push_back(e);
    }

    // Discarded angular tail, measured on the extended degrees (L, L+8].
    const QuadratureRule& rr = d.entries[0].profile.rule;
    double kept = 0.0, dropped = 0.0;
    for (std::size_t q = 0; q < rr.size(); ++q) {
        const std::vector<double>& row = cache->row(rr.nodes[q]);
        const double w = rr.weights[q] * std::pow(rr.nodes[q], n - 1);
        for (int l = 0; l <= L_ext; ++l) {
            const double m = w * row[l] * row[l];
            (l <= L ? kept : dropped) += m;
        }
    }
    d.truncation_tail = dropped / std::max(kept + dropped, 1e-300);
    d.check_invariants();
    return d;
}

std::pair<ModeSet, ModeSet> split_half_waves(const ModeSet& f, const ModeSet& g)
{
    if (f.n != g.n) fail_invalid("position and velocity data must share the dimension");

    // Union of the harmonic indices of both inputs.
    struct Key {
        int l, i;
    };
    std::vector<Key> keys;
    std::vector<const RadialProfile*> fprof, gprof;
    auto locate = [&](const ModeSet& src, int l, int i) -> const RadialProfile* {
        for (const ModeEntry& e : src.entries)
            if (e.l == l && e.i == i) return &e.profile;
        return nullptr;
    };
    for (const ModeEntry& e : f.entries) keys.push_back({e.l, e.i});
    for (const ModeEntry& e : g.entries) {
        bool seen = false;
        for (const Key& k : keys) seen = seen || (k.l == e.l && k.i == e.i);
        if (!seen) keys.push_back({e.l, e.i});
    }

    ModeSet hp, hm;
    hp.n = hm.n = f.n;
    hp.axis = hm.axis = f.axis;
    hp.label = "half-wave-forward";
    hm.label = "half-wave-backward";
    for (const Key& k : keys) {
        const RadialProfile* pf = locate(f, k.l, k.i);
        const RadialProfile* pg = locate(g, k.l, k.i);
        const std::function<complex(double)> ff
            = pf ? pf->fn : std::function<complex(double)>([](double) { return complex(0.0); });
        const std::function<complex(double)> gg
            = pg ? pg->fn : std::function<complex(double)>([](double) { return complex(0.0); });
        const double scale = std::min(pf ? pf->feature_scale : 1.0, pg ? pg->feature_scale : 1.0);
        for (int sign = 0; sign < 2; ++sign) {
            const double s = sign == 0 ? 1.0 : -1.0;
            ModeEntry e;
            e.l = k.l;
            e.i = k.i;
            e.profile = make_profile(
                [ff, gg, s](double rho) {
                    // (2i sqrt(-Laplace))^{-1} acts as (4 pi i rho)^{-1}.
                    return 0.5 * ff(rho) + s * gg(rho) * complex(0.0, -1.0) / (2.0 * two_pi * rho);
                },
                scale);
            (sign == 0 ? hp : hm).entries.push_back(e);
        }
    }
    return {hp, hm};
}

void mode_set_to_csv(std::ostream& out, const ModeSet& data)
{
    out << "n,l,i,rho,re,im\n";
    char line[160];
    for (const ModeEntry& e : data.entries) {
        for (std::size_t q = 0; q < e.profile.rule.size(); ++q) {
            std::snprintf(line, sizeof line, "%d,%d,%d,%.17g,%.17g,%.17g\n", data.n, e.l, e.i,
                          e.profile.rule.nodes[q], e.profile.values[q].real(),
                          e.profile.values[q].imag());
            out << line;
        }
    }
}

} // namespace wplab
