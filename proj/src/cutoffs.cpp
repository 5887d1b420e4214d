// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/cutoffs.hpp"

#include <array>
#include <cmath>

#include "wplab/quadrature.hpp"

namespace wplab {

double model_bump(double t)
{
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

namespace {

// Integrand of the ramp: model_bump mapped from (-1, 1) to (0, 1).
double ramp_density(double s) { return model_bump(2.0 * s - 1.0); }

// Cumulative integrals of ramp_density at 257 equispaced breakpoints of
// [0, 1], each panel integrated with a 16-point Gauss rule.  The density is
// smooth and fully resolved at this panel width, so the table is accurate to
// machine precision (checked in the tests via the symmetry identity
// ramp(u) + ramp(1 - u) = 1).
struct RampTable {
    static constexpr int panels = 256;
    std::array<double, panels + 1> cumulative{};
    QuadratureRule gauss; // 16-point rule on (-1, 1), mapped per panel
    double total = 0.0;

    RampTable() : gauss(gauss_legendre(16))
    {
        const double h = 1.0 / panels;
        cumulative[0] = 0.0;
        for (int j = 0; j < panels; ++j)
            cumulative[j + 1] = cumulative[j] + panel_integral(j * h, (j + 1) * h);
        total = cumulative[panels];
    }

    double panel_integral(double a, double b) const
    {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t q = 0; q < gauss.size(); ++q)
            acc += gauss.weights[q] * ramp_density(mid + half * gauss.nodes[q]);
        return acc * half;
    }
};

const RampTable& ramp_table()
{
    static const RampTable table;
    return table;
}

} // namespace

double smooth_ramp(double u)
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const RampTable& table = ramp_table();
    int j = static_cast<int>(u * RampTable::panels);
    if (j >= RampTable::panels) j = RampTable::panels - 1;
    const double lo = static_cast<double>(j) / RampTable::panels;
    return (table.cumulative[j] + table.panel_integral(lo, u)) / table.total;
}

} // namespace wplab
