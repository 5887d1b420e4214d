// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0
//
// Radial wave packets: Fourier-series localization of unit-band profiles on
// the interval (0, 4), the packet envelope functions psi^l_m, reconstruction
// of evolved modes as translated-packet sums, and empirical verification of
// the three-regime envelope asymptotics with fitted constants.

#ifndef WPLAB_WAVEPACKETS_HPP
#define WPLAB_WAVEPACKETS_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wplab/common.hpp"
#include "wplab/propagator.hpp"

namespace wplab {

// Default symmetric truncation |k| <= packet_k_max of the packet series.
inline constexpr int packet_k_max = 512;

// Fourier coefficients of one radial profile on the interval (0, 4):
//   c_k = (1/4) Int_0^4 c-hat(rho) e^{-i (pi/2) k rho} d rho,
// stored for k_min <= k <= k_min + coeff.size() - 1 after trimming the range
// to the smallest symmetric window whose discarded relative mass is within
// the construction tolerance.
struct PacketSeries {
    int k_min = 0;
    std::vector<complex> coeff;
    double tail = 0.0; // relative l2 mass outside the stored window

    int k_max() const { return k_min + static_cast<int>(coeff.size()) - 1; }
    complex at(int k) const
    {
        if (k < k_min || k > k_max()) return complex(0.0, 0.0);
        return coeff[static_cast<std::size_t>(k - k_min)];
    }
    double l2_mass() const; // sum over stored k of |c_k|^2
};

// Packet coefficients of a whole mode family: one series per harmonic mode.
struct PacketCoefficients {
    int n = 3;
    struct Entry {
        int l = 0;
        int i = 0;
        PacketSeries series;
    };
    std::vector<Entry> entries;

    const PacketSeries& series_for(const HarmonicIndex& idx) const;
    // Sum over modes and k of |c^l_{i,k}|^2 (the packet-side squared mass;
    // by Parseval it equals Sum_modes Int |c-hat|^2 / 4, so it is equivalent
    // to ||u(0)||^2_{L2} within the fixed constants area * rho^{n-1} on the
    // unit band).
    double l2_mass() const;
};

// Fourier coefficients of one unit-band profile.  The profile must carry the
// unit-band support certificate (support in (1/2, 2)); series are truncated
// at |k| <= k_cut and the truncation must leave a relative l2 tail at most
// tail_tol, otherwise construction fails rather than silently degrading the
// reconstruction identity.
PacketSeries to_packets(const RadialProfile& profile, int k_cut = packet_k_max,
                        double tail_tol = 1e-8);

// Packet coefficients for every mode of a data set.
PacketCoefficients to_packets(const ModeSet& data, int k_cut = packet_k_max,
                              double tail_tol = 1e-8);

// The packet envelope
//   psi^l_m(r) = Int J_{(n-2)/2 + l}(2 pi r rho) e^{-2 pi i m rho} chi(rho) drho,
// where chi is the shared wide band bump on (1/4, 4) times rho^{n/2} (the
// volume element is absorbed into the kernel).  Evaluated by the oscillatory
// integrator with node doubling; m may be any real, r >= 0.
complex psi(int n, int l, double m, double r);

// Evolved mode value as a translated-packet sum,
//   c^l_i(t, r) = 2 pi i^l r^{(2-n)/2} Sum_k c^l_{i,k} psi^l_{t - k/4}(r),
// over the stored coefficient window.  Requires r > 0 when n >= 3 (the
// prefactor is singular at the origin; the propagator's series branch covers
// that limit).  Agrees with hankel_mode to the reconstruction tolerance.
complex reconstruct_mode(int n, int l, const PacketSeries& series, double t, double r);
complex reconstruct_mode(const PacketCoefficients& coeffs, const HarmonicIndex& idx,
                         double t, double r);

// ---------------------------------------------------------------------------
// Three-regime envelope bounds |psi^l_m(r)| <= C * shape(l, m, r) and the
// empirical fitting of the constants C.

enum class PsiRegime {
    origin = 0,      // r < 1
    cone = 1,        // 1 <= r <= |m| + 1 (includes the light-cone peak r ~ |m|)
    beyond_cone = 2, // |m| + 1 < r
};

const char* psi_regime_name(PsiRegime regime);

// Which regime (n-independent) the point (m, r) belongs to.
PsiRegime psi_regime(double m, double r);

// The C = 1 envelope shape for the given regime and decay orders:
//   origin:      r^{(n-2)/2} (1 + |m|)^{-N1} (1 + l)^{-N2}
//   cone:        (1 + r + |m|)^{-1/2} (1 + | r - |m| |)^{-N1} (r^{1/2}/(1+l))^{N2}
//   beyond_cone: (r^2 - m^2)^{-1/2} [ (1 + | |m| - r |)^{-N1}
//                                     + min_pm (l / sqrt(r^2 - m^2))^{pm N2} ]
// Both the shape and |psi| are even in m; negative m folds onto |m|.
double psi_bound_shape(int n, int l, double m, double r, int N1, int N2);

// Scan grid for constant fitting.  Degrees, translates (m >= 0; the m < 0
// half of the contract range follows from the conjugation symmetry
// psi^l_{-m} = conj(psi^l_m) and is folded in), and base radii, plus
// log-spaced seam offsets inserted around the regime boundaries r = |m| +- 1
// and r = 1 and the turning point r = l of each scanned degree.
struct ScanGrid {
    std::vector<int> degrees;
    std::vector<double> translates;
    std::vector<double> radii;        // base radii, shared by all (l, m)
    std::vector<double> seam_offsets; // per-(l, m) refinement offsets
    double r_cap = 128.0;             // seam points clamped to [0, r_cap]

    // Radii actually scanned for one (l, m) pair: base plus seams.
    std::vector<double> radii_for(int l, double m) const;
    std::uint64_t hash() const; // FNV-1a over the grid contents
};

// The standard grid: l in {0, 1, 4, 16, 64}, m in [0, 64], r in [0, 128],
// with seam refinement; refine = 2 doubles the density of every family
// (used by the stability check).
ScanGrid default_scan_grid(int refine = 1);

// Fitted constants: smallest C per regime with |psi| <= C * shape on the grid.
struct ConstantsTable {
    int n = 3;
    int N1 = 0;
    int N2 = 0;
    double C[3] = {0.0, 0.0, 0.0}; // indexed by PsiRegime
    std::uint64_t grid_hash = 0;

    double constant(PsiRegime regime) const { return C[static_cast<int>(regime)]; }
};

// Max-ratio fit of the per-regime constants over the scan grid.  Requires
// 0 <= N1, N2 <= 4.  Deterministic for any thread count: tiles are reduced
// with max, which is order-independent.
ConstantsTable fit_constants(int n, int N1, int N2, const ScanGrid& grid, int threads = 1);

// Right-hand side of the regime inequality at the fitted constants.
struct PsiBound {
    double value = 0.0;
    PsiRegime regime = PsiRegime::origin;
};
PsiBound asymptotic_bound(int n, int l, double m, double r, int N1, int N2,
                          const ConstantsTable& table);

// CSV persistence: one row (n, N1, N2, regime, C, grid_hash) per regime.
void constants_table_to_csv(std::ostream& out, const ConstantsTable& table);
std::vector<ConstantsTable> constants_tables_from_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Dense cache of envelope values on the scan lattice.  Translates live on the
// quarter-integer lattice m = j/4 and radii on r = s/16; per radius only the
// moving window | |m| - r | <= margin is stored, which covers BOTH wave
// branches m ~ +r and m ~ -r (the envelope peaks on the light cone |m| ~ r;
// negative translates follow from psi^l_{-m} = conj(psi^l_m) and are served
// by conjugation).  Outside the window the envelope has decayed to the scan
// engine's truncation floor (measured around 1e-4 of the cone peak at the
// default margin 8) and is treated as zero.  The table is immutable after
// the fill; the fill partitions radius rows over threads and is bitwise
// deterministic for any thread count.
class PsiTable {
public:
    PsiTable(int n, int l_max, double r_max, double margin = 8.0, int threads = 1);

    int n() const { return n_; }
    int l_max() const { return l_max_; }
    double r_max() const { return 0.0625 * static_cast<double>(r_count_ - 1); }
    double margin() const { return margin_; }

    // psi(n, l, j/4, s/16); exactly zero outside the stored window.
    complex value(int l, int j, int s) const;

    // Translated-packet sum over both window branches at t = t_quarter/4,
    // r = s/16.  Requires s > 0 when n >= 3 (prefactor singular at r = 0).
    complex reconstruct(const PacketSeries& series, int l, int t_quarter, int s) const;

private:
    int window(int s, int* j_min) const; // slot count and first j for radius row s

    int n_ = 3;
    int l_max_ = 0;
    int r_count_ = 0;
    double margin_ = 8.0;
    std::vector<std::size_t> row_offset_; // per radius row, into values_
    std::vector<int> row_j_min_;
    std::vector<complex> values_; // [row][l][j - j_min] contiguous
};

} // namespace wplab

#endif
