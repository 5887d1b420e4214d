// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/wavepackets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "wplab/cutoffs.hpp"
#include "wplab/parallel.hpp"
#include "wplab/quadrature.hpp"
#include "wplab/specfun.hpp"

namespace wplab {

namespace {

// The rho interval carrying every unit-band profile and the packet kernel.
constexpr double band_lo = 0.25;
constexpr double band_hi = 4.0;
constexpr double band_len = band_hi - band_lo;

// Packet kernel chi(rho): the wide band bump with the volume element
// rho^{n/2} absorbed; identically rho^{n/2} on the unit band (1/2, 2).
double packet_chi(int n, double rho)
{
    return packet_band_bump(rho) * std::pow(rho, 0.5 * n);
}

// Power-of-two panel count resolving `bandwidth` rho-oscillations over the
// band with at least 8 nodes per cycle on 32-node panels.  Power-of-two
// counts keep the node families nested, so memoized profile evaluations are
// shared across calls.
int panels_for_bandwidth(double bandwidth, int min_panels)
{
    double cycles = std::max(0.0, bandwidth) * band_len;
    int panels = std::max(min_panels, static_cast<int>(std::ceil(cycles * 8.0 / 32.0)));
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(panels)));
}

void check_dimension(const char* who, int n)
{
    if (n < 2 || n > 4) fail_invalid(std::string(who) + ": dimension must be 2, 3 or 4");
}

void check_orders(const char* who, int N1, int N2)
{
    if (N1 < 0 || N1 > 4 || N2 < 0 || N2 > 4)
        fail_invalid(std::string(who) + ": decay orders N1, N2 must lie in [0, 4]");
}

} // namespace

// Packet series --------------------------------------------------------------

double PacketSeries::l2_mass() const
{
    double total = 0.0;
    for (const complex& c : coeff) total += std::norm(c);
    return total;
}

const PacketSeries& PacketCoefficients::series_for(const HarmonicIndex& idx) const
{
    if (idx.n != n) fail_invalid("PacketCoefficients: dimension mismatch in mode lookup");
    for (const Entry& e : entries)
        if (e.l == idx.l && e.i == idx.i) return e.series;
    fail_invalid("PacketCoefficients: no coefficients for the requested mode");
}

double PacketCoefficients::l2_mass() const
{
    double total = 0.0;
    for (const Entry& e : entries) total += e.series.l2_mass();
    return total;
}

PacketSeries to_packets(const RadialProfile& profile, int k_cut, double tail_tol)
{
    if (!profile.unit_band)
        fail_invalid("to_packets: the profile must be supported in the unit band (1/2, 2)");
    if (k_cut < 0) fail_invalid("to_packets: negative series cutoff");
    if (!(tail_tol > 0.0)) fail_invalid("to_packets: tail tolerance must be positive");

    // One dense rule resolves every retained frequency k/4 at once; the
    // coefficients fall out of a single sweep with an iterated phase factor.
    const QuadratureRule rule =
        composite_gauss(32, panels_for_bandwidth(0.25 * k_cut, 64), band_lo, band_hi);

    const int count = 2 * k_cut + 1;
    std::vector<complex> c(static_cast<std::size_t>(count), complex(0.0, 0.0));
    double band_mass = 0.0; // (1/4) Int |c-hat|^2, the full series l2 mass
    double band_sup = 0.0;  // max |c-hat| over the rule nodes
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double rho = rule.nodes[q];
        const complex v = profile.fn(rho);
        const complex amp = 0.25 * rule.weights[q] * v;
        band_mass += 0.25 * rule.weights[q] * std::norm(v);
        band_sup = std::max(band_sup, std::abs(v));
        // e^{-i (pi/2) k rho} walked from k = -k_cut upward.
        complex phase = std::polar(1.0, 0.5 * pi * rho * k_cut);
        const complex step = std::polar(1.0, -0.5 * pi * rho);
        for (int j = 0; j < count; ++j) {
            c[static_cast<std::size_t>(j)] += amp * phase;
            phase *= step;
        }
    }

    if (band_mass <= 1e-300) {
        PacketSeries zero;
        zero.k_min = 0;
        zero.coeff.assign(1, complex(0.0, 0.0));
        zero.tail = 0.0;
        return zero;
    }

    // The series beyond the cutoff must be mass-negligible: its l1 size is
    // not observable from the computed window, so anything that parks real
    // mass there is refused instead of silently corrupting reconstructions.
    double stored = 0.0;
    for (const complex& v : c) stored += std::norm(v);
    const double beyond = std::max(0.0, band_mass - stored);
    if (beyond > 1e-4 * tail_tol * band_mass)
        fail_invalid("to_packets: series mass beyond the frequency cutoff exceeds the "
                     "truncation tolerance; the profile needs a larger cutoff");

    // Trim to the smallest symmetric window whose discarded l1 weight keeps
    // the sup-norm reconstruction error within tail_tol of the profile scale
    // (an l2 criterion is too weak: the dropped terms add up pointwise).
    const double l1_budget = tail_tol * band_sup;
    double l1_out = 0.0;
    double mass_out = beyond;
    int keep = k_cut;
    while (keep > 0) {
        const complex lo = c[static_cast<std::size_t>(k_cut - keep)];
        const complex hi = c[static_cast<std::size_t>(k_cut + keep)];
        if (l1_out + std::abs(lo) + std::abs(hi) > l1_budget) break;
        l1_out += std::abs(lo) + std::abs(hi);
        mass_out += std::norm(lo) + std::norm(hi);
        --keep;
    }

    PacketSeries out;
    out.k_min = -keep;
    out.coeff.assign(c.begin() + (k_cut - keep), c.begin() + (k_cut + keep) + 1);
    out.tail = mass_out / band_mass;
    return out;
}

PacketCoefficients to_packets(const ModeSet& data, int k_cut, double tail_tol)
{
    PacketCoefficients out;
    out.n = data.n;
    out.entries.reserve(data.entries.size());
    for (const ModeEntry& e : data.entries)
        out.entries.push_back({e.l, e.i, to_packets(e.profile, k_cut, tail_tol)});
    return out;
}

// Packet envelope ------------------------------------------------------------

complex psi(int n, int l, double m, double r)
{
    check_dimension("psi", n);
    if (l < 0) fail_invalid("psi: negative degree");
    if (!(r >= 0.0)) fail_invalid("psi: radius must be nonnegative");
    if (!std::isfinite(m)) fail_invalid("psi: translate must be finite");

    const BesselOrder order = BesselOrder::for_dimension(n, l);
    static const QuadratureRule base = composite_gauss(32, 16, band_lo, band_hi);
    auto amplitude = [&](double rho) {
        return complex(packet_chi(n, rho) * bessel_j_fast(order, two_pi * r * rho), 0.0);
    };
    return oscillatory_integrate(amplitude, -m, base, 1e-10, r);
}

complex reconstruct_mode(int n, int l, const PacketSeries& series, double t, double r)
{
    check_dimension("reconstruct_mode", n);
    if (l < 0) fail_invalid("reconstruct_mode: negative degree");
    if (n >= 3 && !(r > 0.0))
        fail_invalid("reconstruct_mode: the r^{(2-n)/2} prefactor is singular at r = 0; "
                     "use the propagator's series branch for the origin limit");
    if (n == 2 && !(r >= 0.0)) fail_invalid("reconstruct_mode: radius must be nonnegative");

    double peak = 0.0;
    for (const complex& v : series.coeff) peak = std::max(peak, std::abs(v));
    const double skip = 1e-13 * peak;

    complex sum(0.0, 0.0);
    for (int k = series.k_min; k <= series.k_max(); ++k) {
        const complex c = series.at(k);
        if (std::abs(c) <= skip) continue;
        sum += c * psi(n, l, t - 0.25 * k, r);
    }
    return two_pi * unit_imag_pow(l) * std::pow(r, 0.5 * (2 - n)) * sum;
}

complex reconstruct_mode(const PacketCoefficients& coeffs, const HarmonicIndex& idx,
                         double t, double r)
{
    return reconstruct_mode(coeffs.n, idx.l, coeffs.series_for(idx), t, r);
}

// Envelope bounds ------------------------------------------------------------

const char* psi_regime_name(PsiRegime regime)
{
    switch (regime) {
    case PsiRegime::origin: return "origin";
    case PsiRegime::cone: return "cone";
    default: return "beyond_cone";
    }
}

PsiRegime psi_regime(double m, double r)
{
    if (r < 1.0) return PsiRegime::origin;
    if (r <= std::fabs(m) + 1.0) return PsiRegime::cone;
    return PsiRegime::beyond_cone;
}

double psi_bound_shape(int n, int l, double m, double r, int N1, int N2)
{
    check_dimension("psi_bound_shape", n);
    check_orders("psi_bound_shape", N1, N2);
    if (l < 0 || !(r >= 0.0)) fail_invalid("psi_bound_shape: invalid degree or radius");

    const double mm = std::fabs(m);
    switch (psi_regime(m, r)) {
    case PsiRegime::origin:
        return std::pow(r, 0.5 * (n - 2)) * std::pow(1.0 + mm, -N1) *
               std::pow(1.0 + l, -N2);
    case PsiRegime::cone:
        return std::pow(1.0 + r + mm, -0.5) * std::pow(1.0 + std::fabs(r - mm), -N1) *
               std::pow(std::sqrt(r) / (1.0 + l), N2);
    default: {
        const double d = std::sqrt(r * r - m * m); // > 1 whenever r > |m| + 1
        double balance; // min_pm (l/d)^{pm N2}
        if (N2 == 0) {
            balance = 1.0;
        } else if (l == 0) {
            balance = 0.0;
        } else {
            const double up = std::pow(static_cast<double>(l) / d, N2);
            balance = std::min(up, 1.0 / up);
        }
        return (std::pow(1.0 + std::fabs(mm - r), -N1) + balance) / d;
    }
    }
}

std::vector<double> ScanGrid::radii_for(int l, double m) const
{
    std::vector<double> rs = radii;
    // Seam centers: the (m-dependent) regime boundaries r = |m| -+ 1, the
    // fixed origin/cone boundary r = 1, and the Bessel turning point r ~ l.
    const double centers[4] = {std::fabs(m) - 1.0, std::fabs(m) + 1.0, 1.0,
                               static_cast<double>(l)};
    for (double c : centers) {
        for (double d : seam_offsets) {
            for (double r : {c - d, c, c + d})
                if (r >= 0.0 && r <= r_cap) rs.push_back(r);
        }
    }
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return rs;
}

std::uint64_t ScanGrid::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix_doubles = [&](const std::vector<double>& v) {
        std::uint64_t count = v.size();
        h = fnv1a(&count, sizeof(count), h);
        if (!v.empty()) h = fnv1a(v.data(), v.size() * sizeof(double), h);
    };
    std::uint64_t count = degrees.size();
    h = fnv1a(&count, sizeof(count), h);
    if (!degrees.empty()) h = fnv1a(degrees.data(), degrees.size() * sizeof(int), h);
    mix_doubles(translates);
    mix_doubles(radii);
    mix_doubles(seam_offsets);
    h = fnv1a(&r_cap, sizeof(r_cap), h);
    return h;
}

ScanGrid default_scan_grid(int refine)
{
    if (refine < 1 || refine > 8) fail_invalid("default_scan_grid: refine must lie in [1, 8]");
    ScanGrid g;
    g.degrees = {0, 1, 4, 16, 64};
    // Translates: zero plus a geometric ladder from 1/4 to 64 (the m < 0 half
    // of the contract range folds onto these by conjugation symmetry).
    g.translates.push_back(0.0);
    for (int j = 0; j <= 32 * refine; ++j)
        g.translates.push_back(std::exp2(-2.0 + static_cast<double>(j) / (4.0 * refine)));
    // Radii: zero plus a geometric ladder from 1/16 to 128.
    g.radii.push_back(0.0);
    for (int j = 0; j <= 44 * refine; ++j)
        g.radii.push_back(std::exp2(-4.0 + static_cast<double>(j) / (4.0 * refine)));
    // Log-spaced seam offsets from 2 down to 1/16.
    for (int j = 0; j <= 5 * refine; ++j)
        g.seam_offsets.push_back(std::exp2(1.0 - static_cast<double>(j) / refine));
    g.r_cap = 128.0;
    return g;
}

ConstantsTable fit_constants(int n, int N1, int N2, const ScanGrid& grid, int threads)
{
    check_dimension("fit_constants", n);
    check_orders("fit_constants", N1, N2);
    if (grid.degrees.empty() || grid.translates.empty())
        fail_invalid("fit_constants: empty scan grid");

    // |psi| and every regime shape are even in m, so each translate is
    // scanned through its absolute value (this is what folds the m < 0 half
    // of the grid onto the m >= 0 ladder).
    std::set<double> folded;
    for (double m : grid.translates) {
        if (!std::isfinite(m)) fail_invalid("fit_constants: non-finite translate");
        folded.insert(std::fabs(m));
    }
    const std::vector<double> ms(folded.begin(), folded.end());

    struct Tile {
        int l;
        double m;
    };
    std::vector<Tile> tiles;
    for (int l : grid.degrees) {
        if (l < 0) fail_invalid("fit_constants: negative degree in scan grid");
        for (double m : ms) tiles.push_back({l, m});
    }

    std::vector<std::array<double, 3>> tile_max(tiles.size(), {0.0, 0.0, 0.0});
    run_tiled(static_cast<int>(tiles.size()), threads, [&](int lo, int hi) {
        for (int ti = lo; ti < hi; ++ti) {
            const Tile tile = tiles[static_cast<std::size_t>(ti)];
            auto& best = tile_max[static_cast<std::size_t>(ti)];
            for (double r : grid.radii_for(tile.l, tile.m)) {
                const double shape = psi_bound_shape(n, tile.l, tile.m, r, N1, N2);
                if (!(shape > 0.0)) continue; // 0/0 corner: psi vanishes with the shape
                const double value = std::abs(psi(n, tile.l, tile.m, r));
                const int regime = static_cast<int>(psi_regime(tile.m, r));
                best[static_cast<std::size_t>(regime)] =
                    std::max(best[static_cast<std::size_t>(regime)], value / shape);
            }
        }
    });

    ConstantsTable table;
    table.n = n;
    table.N1 = N1;
    table.N2 = N2;
    table.grid_hash = grid.hash();
    for (const auto& best : tile_max)
        for (int reg = 0; reg < 3; ++reg)
            table.C[reg] = std::max(table.C[reg], best[static_cast<std::size_t>(reg)]);
    return table;
}

PsiBound asymptotic_bound(int n, int l, double m, double r, int N1, int N2,
                          const ConstantsTable& table)
{
    check_orders("asymptotic_bound", N1, N2);
    if (table.n != n || table.N1 != N1 || table.N2 != N2)
        fail_invalid("asymptotic_bound: the constants table was fitted for different "
                     "(n, N1, N2) parameters");
    PsiBound out;
    out.regime = psi_regime(m, r);
    out.value = table.constant(out.regime) * psi_bound_shape(n, l, m, r, N1, N2);
    return out;
}

void constants_table_to_csv(std::ostream& out, const ConstantsTable& table)
{
    out << "n,N1,N2,regime,C,grid_hash\n";
    char line[160];
    for (int reg = 0; reg < 3; ++reg) {
        std::snprintf(line, sizeof(line), "%d,%d,%d,%s,%.17g,%llu\n", table.n, table.N1,
                      table.N2, psi_regime_name(static_cast<PsiRegime>(reg)),
                      table.C[reg],
                      static_cast<unsigned long long>(table.grid_hash));
        out << line;
    }
}

std::vector<ConstantsTable> constants_tables_from_csv(std::istream& in)
{
    std::vector<ConstantsTable> tables;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("n,", 0) == 0) continue; // header
        int n = 0;
        int N1 = 0;
        int N2 = 0;
        char name[32] = {0};
        double c = 0.0;
        unsigned long long hash = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%31[^,],%lg,%llu", &n, &N1, &N2, name, &c,
                        &hash) != 6)
            fail_invalid("constants_tables_from_csv: malformed row: " + line);
        int regime = -1;
        for (int reg = 0; reg < 3; ++reg)
            if (std::strcmp(name, psi_regime_name(static_cast<PsiRegime>(reg))) == 0)
                regime = reg;
        if (regime < 0)
            fail_invalid("constants_tables_from_csv: unknown regime name: " +
                         std::string(name));
        ConstantsTable* slot = nullptr;
        for (ConstantsTable& t : tables)
            if (t.n == n && t.N1 == N1 && t.N2 == N2 && t.grid_hash == hash) slot = &t;
        if (slot == nullptr) {
            ConstantsTable t;
            t.n = n;
            t.N1 = N1;
            t.N2 = N2;
            t.grid_hash = hash;
            tables.push_back(t);
            slot = &tables.back();
        }
        slot->C[regime] = c;
    }
    return tables;
}

// Envelope table -------------------------------------------------------------

PsiTable::PsiTable(int n, int l_max, double r_max, double margin, int threads)
    : n_(n)
    , l_max_(l_max)
    , margin_(margin)
{
    check_dimension("PsiTable", n);
    if (l_max < 0 || l_max > 512) fail_invalid("PsiTable: degree cap out of range");
    if (!(r_max >= 0.0) || r_max > 4096.0) fail_invalid("PsiTable: radius cap out of range");
    if (!(margin >= 1.0) || margin > 64.0) fail_invalid("PsiTable: margin out of range");
    r_count_ = static_cast<int>(std::llround(16.0 * r_max)) + 1;

    row_offset_.resize(static_cast<std::size_t>(r_count_) + 1, 0);
    row_j_min_.resize(static_cast<std::size_t>(r_count_), 0);
    for (int s = 0; s < r_count_; ++s) {
        int j_min = 0;
        const int slots = window(s, &j_min);
        row_j_min_[static_cast<std::size_t>(s)] = j_min;
        row_offset_[static_cast<std::size_t>(s) + 1] =
            row_offset_[static_cast<std::size_t>(s)] +
            static_cast<std::size_t>(l_max_ + 1) * static_cast<std::size_t>(slots);
    }
    values_.assign(row_offset_.back(), complex(0.0, 0.0));

    run_tiled(r_count_, threads, [&](int lo, int hi) {
        std::vector<double> bess(static_cast<std::size_t>(l_max_) + 1);
        std::vector<complex> phases;
        for (int s = lo; s < hi; ++s) {
            const double r = 0.0625 * static_cast<double>(s);
            const int j_min = row_j_min_[static_cast<std::size_t>(s)];
            const int slots = static_cast<int>(
                (row_offset_[static_cast<std::size_t>(s) + 1] -
                 row_offset_[static_cast<std::size_t>(s)]) /
                static_cast<std::size_t>(l_max_ + 1));
            complex* acc = values_.data() + row_offset_[static_cast<std::size_t>(s)];
            phases.resize(static_cast<std::size_t>(slots));
            const QuadratureRule rule = composite_gauss(
                32, panels_for_bandwidth(2.0 * r + margin_, 64), band_lo, band_hi);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double rho = rule.nodes[q];
                const double amp = rule.weights[q] * packet_chi(n_, rho);
                bessel_j_batch(n_ - 2, l_max_ + 1, two_pi * r * rho, bess.data());
                complex phase = std::polar(1.0, -0.5 * pi * rho * j_min);
                const complex step = std::polar(1.0, -0.5 * pi * rho);
                for (int slot = 0; slot < slots; ++slot) {
                    phases[static_cast<std::size_t>(slot)] = phase;
                    phase *= step;
                }
                for (int l = 0; l <= l_max_; ++l) {
                    const double a = amp * bess[static_cast<std::size_t>(l)];
                    complex* row = acc + static_cast<std::size_t>(l) *
                                             static_cast<std::size_t>(slots);
                    for (int slot = 0; slot < slots; ++slot)
                        row[slot] += a * phases[static_cast<std::size_t>(slot)];
                }
            }
        }
    });
}

int PsiTable::window(int s, int* j_min) const
{
    const double four_r = 0.25 * static_cast<double>(s); // 4 * (s/16), exact
    const int lo = std::max(0, static_cast<int>(std::ceil(four_r - 4.0 * margin_)));
    const int hi = static_cast<int>(std::floor(four_r + 4.0 * margin_));
    *j_min = lo;
    return hi - lo + 1;
}

complex PsiTable::value(int l, int j, int s) const
{
    if (l < 0 || l > l_max_) fail_invalid("PsiTable::value: degree outside the table");
    if (s < 0 || s >= r_count_) fail_invalid("PsiTable::value: radius index outside the table");
    if (j < 0) return std::conj(value(l, -j, s)); // psi^l_{-m} = conj(psi^l_m)
    const int j_min = row_j_min_[static_cast<std::size_t>(s)];
    const int slots = static_cast<int>((row_offset_[static_cast<std::size_t>(s) + 1] -
                                        row_offset_[static_cast<std::size_t>(s)]) /
                                       static_cast<std::size_t>(l_max_ + 1));
    if (j < j_min || j >= j_min + slots) return complex(0.0, 0.0);
    return values_[row_offset_[static_cast<std::size_t>(s)] +
                   static_cast<std::size_t>(l) * static_cast<std::size_t>(slots) +
                   static_cast<std::size_t>(j - j_min)];
}

complex PsiTable::reconstruct(const PacketSeries& series, int l, int t_quarter, int s) const
{
    if (l < 0 || l > l_max_) fail_invalid("PsiTable::reconstruct: degree outside the table");
    if (s < 0 || s >= r_count_)
        fail_invalid("PsiTable::reconstruct: radius index outside the table");
    if (n_ >= 3 && s == 0)
        fail_invalid("PsiTable::reconstruct: the r^{(2-n)/2} prefactor is singular at r = 0");

    const int j_min = row_j_min_[static_cast<std::size_t>(s)];
    const int slots = static_cast<int>((row_offset_[static_cast<std::size_t>(s) + 1] -
                                        row_offset_[static_cast<std::size_t>(s)]) /
                                       static_cast<std::size_t>(l_max_ + 1));
    const complex* row = values_.data() + row_offset_[static_cast<std::size_t>(s)] +
                         static_cast<std::size_t>(l) * static_cast<std::size_t>(slots);
    complex sum(0.0, 0.0);
    for (int slot = 0; slot < slots; ++slot) {
        const int j = j_min + slot;
        // Outgoing branch m = j/4 (k = t_quarter - j) ...
        sum += series.at(t_quarter - j) * row[slot];
        // ... and the reflected branch m = -j/4 served by conjugation.
        if (j > 0) sum += series.at(t_quarter + j) * std::conj(row[slot]);
    }
    const double r = 0.0625 * static_cast<double>(s);
    return two_pi * unit_imag_pow(l) * std::pow(r, 0.5 * (2 - n_)) * sum;
}

} // namespace wplab
