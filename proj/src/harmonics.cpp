// Copyright (c) 2026 the wavepacket-lab developers
// SPDX-License-Identifier: Apache-2.0

#include "wplab/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "wplab/cutoffs.hpp"
#include "wplab/quadrature.hpp"

namespace wplab {

namespace {

void check_dimension(int n)
{
    if (n < 2 || n > 4) fail_invalid("sphere dimension parameter must be 2, 3 or 4");
}

double dot(const SpherePoint& a, const SpherePoint& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Orthonormal frame (axis, b1, b2, ...) completing the given unit axis.
struct Frame {
    SpherePoint a{}, b1{}, b2{}, b3{};
};

Frame make_frame(int n, const SpherePoint& axis)
{
    Frame f;
    const double len = std::sqrt(dot(axis, axis));
    if (!(len > 0.0)) fail_invalid("basis axis must be a nonzero vector");
    for (int k = 0; k < 4; ++k) f.a[k] = axis[k] / len;

    // Gram-Schmidt coordinate directions, trying the ones least aligned with
    // the axis first so the frame is well conditioned and deterministic.
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int p, int q) { return std::abs(f.a[p]) < std::abs(f.a[q]); });

    std::array<SpherePoint, 3> cols{};
    int have = 0;
    for (int idx = 0; idx < 4 && have < n - 1; ++idx) {
        SpherePoint v{};
        v[order[idx]] = 1.0;
        double p = dot(v, f.a);
        for (int k = 0; k < 4; ++k) v[k] -= p * f.a[k];
        for (int j = 0; j < have; ++j) {
            p = dot(v, cols[j]);
            for (int k = 0; k < 4; ++k) v[k] -= p * cols[j][k];
        }
        const double vn = std::sqrt(dot(v, v));
        if (vn < 1e-8) continue;
        for (int k = 0; k < 4; ++k) v[k] /= vn;
        cols[have++] = v;
    }
    f.b1 = cols[0];
    f.b2 = cols[1];
    f.b3 = cols[2];
    return f;
}

// Fully normalized associated Legendre table: P[m][l] for 0 <= m <= l <= L,
// normalized so that (1/2) * integral_{-1}^{1} P_l^m(c)^2 dc = 1.
void normalized_assoc_legendre(int L, double c, double s, std::vector<std::vector<double>>& P)
{
    P.assign(L + 1, {});
    for (int m = 0; m <= L; ++m) P[m].assign(L + 1, 0.0);
    P[0][0] = 1.0;
    for (int m = 1; m <= L; ++m)
        P[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * P[m - 1][m - 1];
    for (int m = 0; m < L; ++m)
        P[m][m + 1] = std::sqrt(2.0 * m + 3.0) * c * P[m][m];
    for (int m = 0; m <= L; ++m) {
        for (int l = m + 2; l <= L; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
            const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - m * m)
                                       / (4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0));
            P[m][l] = a * (c * P[m][l - 1] - b * P[m][l - 2]);
        }
    }
}

} // namespace

SpherePoint default_axis(int n)
{
    check_dimension(n);
    SpherePoint a{};
    if (n == 3)
        a[2] = 1.0; // conventional pole for the full S^2 basis
    else
        a[0] = 1.0; // first coordinate axis
    return a;
}

int dim_Y(int n, int l)
{
    if (n < 2 || l < 0) fail_invalid("dim_Y requires n >= 2 and l >= 0");
    if (l == 0) return 1;
    // (1/l) (n + 2l - 2) * binomial(n + l - 3, l - 1), computed exactly.
    long long binom = 1;
    for (int j = 1; j <= l - 1; ++j) binom = binom * (n - 2 + j) / j; // C(n+l-3, l-1)
    return static_cast<int>(binom * (n + 2 * l - 2) / l);
}

double eigenvalue(int n, int l)
{
    if (n < 2 || l < 0) fail_invalid("eigenvalue requires n >= 2 and l >= 0");
    return static_cast<double>(l) * (n + l - 2);
}

int basis_slots(int n, int l)
{
    check_dimension(n);
    return n == 4 ? 1 : dim_Y(n, l);
}

int flat_offset(int n, int l)
{
    check_dimension(n);
    if (n == 4) return l;
    if (n == 2) return l == 0 ? 0 : 2 * l - 1;
    return l * l; // n = 3: sum of (2k+1) below l
}

int flat_size(int n, int L_max) { return flat_offset(n, L_max) + basis_slots(n, L_max); }

SphereFunction::SphereFunction(int n_, int L_max_) : SphereFunction(n_, L_max_, default_axis(n_))
{
}

SphereFunction::SphereFunction(int n_, int L_max_, const SpherePoint& axis_)
    : n(n_), L_max(L_max_), axis(axis_)
{
    check_dimension(n);
    if (L_max < 0) fail_invalid("SphereFunction truncation degree must be >= 0");
    coeffs.assign(flat_size(n, L_max), complex(0.0, 0.0));
}

complex& SphereFunction::at(int l, int i)
{
    if (l < 0 || l > L_max || i < 0 || i >= basis_slots(n, l))
        fail_invalid("harmonic index out of range");
    return coeffs[flat_offset(n, l) + i];
}

const complex& SphereFunction::at(int l, int i) const
{
    if (l < 0 || l > L_max || i < 0 || i >= basis_slots(n, l))
        fail_invalid("harmonic index out of range");
    return coeffs[flat_offset(n, l) + i];
}

double SphereFunction::l2_norm() const
{
    double acc = 0.0;
    for (const complex& c : coeffs) acc += std::norm(c);
    return std::sqrt(acc);
}

complex SphereFunction::evaluate(const SpherePoint& omega) const
{
    std::vector<double> basis;
    eval_basis_all(n, L_max, omega, axis, basis);
    complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * basis[k];
    return acc;
}

void eval_basis_all(int n, int L_max, const SpherePoint& omega, const SpherePoint& axis,
                    std::vector<double>& out)
{
    check_dimension(n);
    out.assign(flat_size(n, L_max), 0.0);
    const Frame f = make_frame(n, axis);

    if (n == 2) {
        // Relative angle about the axis.
        const double x = dot(omega, f.a);
        const double y = dot(omega, f.b1);
        const double tau = std::atan2(y, x);
        out[0] = 1.0;
        const double root2 = std::sqrt(2.0);
        for (int l = 1; l <= L_max; ++l) {
            out[flat_offset(2, l) + 0] = root2 * std::cos(l * tau);
            out[flat_offset(2, l) + 1] = root2 * std::sin(l * tau);
        }
        return;
    }

    if (n == 4) {
        // Zonal slots only: U_l(cos angle to the axis).
        const double c = std::clamp(dot(omega, f.a), -1.0, 1.0);
        double prev = 1.0, cur = 2.0 * c;
        out[0] = 1.0;
        for (int l = 1; l <= L_max; ++l) {
            out[l] = cur;
            const double next = 2.0 * c * cur - prev;
            prev = cur;
            cur = next;
        }
        return;
    }

    // n = 3: polar/azimuthal coordinates about the axis frame.
    const double c = std::clamp(dot(omega, f.a), -1.0, 1.0);
    const double px = dot(omega, f.b1);
    const double py = dot(omega, f.b2);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = std::atan2(py, px);

    std::vector<std::vector<double>> P;
    normalized_assoc_legendre(L_max, c, s, P);

    const double root2 = std::sqrt(2.0);
    for (int l = 0; l <= L_max; ++l) {
        const int base = flat_offset(3, l);
        out[base] = P[0][l];
        for (int m = 1; m <= l; ++m) {
            out[base + 2 * m - 1] = root2 * P[m][l] * std::cos(m * phi);
            out[base + 2 * m] = root2 * P[m][l] * std::sin(m * phi);
        }
    }
}

double eval_basis(const HarmonicIndex& idx, const SpherePoint& omega)
{
    return eval_basis(idx, omega, default_axis(idx.n));
}

double eval_basis(const HarmonicIndex& idx, const SpherePoint& omega, const SpherePoint& axis)
{
    check_dimension(idx.n);
    if (idx.l < 0 || idx.i < 0 || idx.i >= basis_slots(idx.n, idx.l))
        fail_invalid("unsupported harmonic index for this dimension");
    std::vector<double> all;
    eval_basis_all(idx.n, idx.l, omega, axis, all);
    return all[flat_offset(idx.n, idx.l) + idx.i];
}

double addition_theorem_residual(int n, int l, const std::vector<SpherePoint>& samples)
{
    if (n != 2 && n != 3) fail_invalid("addition theorem check requires a full basis (n = 2 or 3)");
    const int dim = dim_Y(n, l);
    double worst = 0.0;
    std::vector<double> basis;
    for (const SpherePoint& omega : samples) {
        eval_basis_all(n, l, omega, default_axis(n), basis);
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double v = basis[flat_offset(n, l) + i];
            acc += v * v;
        }
        worst = std::max(worst, std::abs(acc - dim) / dim);
    }
    return worst;
}

SphereFunction omega_power(const SphereFunction& F, double s)
{
    SphereFunction G = F;
    if (s == 0.0) return G;
    for (int l = 0; l <= F.L_max; ++l) {
        const int base = flat_offset(F.n, l);
        const int slots = basis_slots(F.n, l);
        if (l == 0) {
            if (s < 0.0) {
                for (int i = 0; i < slots; ++i)
                    if (std::norm(F.coeffs[base + i]) > 0.0)
                        fail_invalid("negative power of the angular Laplacian is undefined on "
                                     "the degree-0 component");
            }
            for (int i = 0; i < slots; ++i) G.coeffs[base + i] = complex(0.0, 0.0);
            continue;
        }
        const double scale = std::pow(eigenvalue(F.n, l), 0.5 * s);
        for (int i = 0; i < slots; ++i) G.coeffs[base + i] = F.coeffs[base + i] * scale;
    }
    return G;
}

double hs_omega_norm(const SphereFunction& F, double s)
{
    if (s < 0.0) fail_invalid("angular Sobolev norm requires s >= 0");
    double acc = 0.0;
    for (int l = 0; l <= F.L_max; ++l) {
        const int base = flat_offset(F.n, l);
        const int slots = basis_slots(F.n, l);
        double w = 1.0; // the plain L^2 term
        if (l == 0)
            w += (s == 0.0) ? 1.0 : 0.0;
        else
            w += std::pow(eigenvalue(F.n, l), s);
        for (int i = 0; i < slots; ++i) acc += w * std::norm(F.coeffs[base + i]);
    }
    return std::sqrt(acc);
}

SphereFunction dyadic_project(const SphereFunction& F, int j)
{
    SphereFunction G = F;
    if (j == DYADIC_ZERO) {
        for (int l = 1; l <= F.L_max; ++l) {
            const int base = flat_offset(F.n, l);
            for (int i = 0; i < basis_slots(F.n, l); ++i) G.coeffs[base + i] = complex(0.0, 0.0);
        }
        return G;
    }
    if (j < 0) fail_invalid("dyadic projection index must be >= 0 or the degree-0 sentinel");
    const double scale_in = std::ldexp(1.0, -j); // 2^{-j}
    for (int l = 0; l <= F.L_max; ++l) {
        const double w = theta0(scale_in * l);
        const int base = flat_offset(F.n, l);
        for (int i = 0; i < basis_slots(F.n, l); ++i) G.coeffs[base + i] *= w;
    }
    return G;
}

AngularQuadrature make_angular_quadrature(int n, int degree)
{
    return make_angular_quadrature(n, degree, default_axis(n));
}

AngularQuadrature make_angular_quadrature(int n, int degree, const SpherePoint& axis)
{
    check_dimension(n);
    if (degree < 0) fail_invalid("quadrature exactness degree must be >= 0");
    AngularQuadrature q;
    q.n = n;
    q.exactness_degree = degree;
    const Frame f = make_frame(n, axis);

    if (n == 2) {
        const int M = std::max(degree + 1, 4);
        q.nodes.reserve(M);
        q.weights.assign(M, two_pi / M);
        for (int j = 0; j < M; ++j) {
            const double t = two_pi * j / M;
            SpherePoint p{};
            for (int k = 0; k < 4; ++k) p[k] = std::cos(t) * f.a[k] + std::sin(t) * f.b1[k];
            q.nodes.push_back(p);
        }
        return q;
    }

    if (n == 3) {
        const int G = std::max((degree + 2) / 2, 2);
        const int M = std::max(degree + 1, 4);
        const QuadratureRule gl = gauss_legendre(G);
        for (int g = 0; g < G; ++g) {
            const double c = gl.nodes[g];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int j = 0; j < M; ++j) {
                const double phi = two_pi * j / M;
                SpherePoint p{};
                for (int k = 0; k < 4; ++k)
                    p[k] = c * f.a[k] + s * (std::cos(phi) * f.b1[k] + std::sin(phi) * f.b2[k]);
                q.nodes.push_back(p);
                q.weights.push_back(gl.weights[g] * two_pi / M);
            }
        }
        return q;
    }

    // n = 4, zonal-only: Gauss quadrature for the weight sqrt(1 - c^2)
    // (Chebyshev second kind), nodes placed on a fixed meridian.
    const int M = std::max((degree + 2) / 2, 2);
    for (int j = 1; j <= M; ++j) {
        const double t = j * pi / (M + 1);
        const double c = std::cos(t);
        const double s = std::sin(t);
        SpherePoint p{};
        for (int k = 0; k < 4; ++k) p[k] = c * f.a[k] + s * f.b1[k];
        q.nodes.push_back(p);
        q.weights.push_back(4.0 * pi * (pi / (M + 1)) * s * s);
    }
    return q;
}

double bernstein_ratio(const SphereFunction& F, const AngularQuadrature& quad)
{
    if (F.l2_norm() == 0.0) fail_invalid("sup/L2 ratio is undefined for the zero function");
    if (quad.n != F.n) fail_invalid("quadrature dimension does not match the function");

    int top = 0;
    for (int l = 0; l <= F.L_max; ++l) {
        const int base = flat_offset(F.n, l);
        for (int i = 0; i < basis_slots(F.n, l); ++i)
            if (std::norm(F.coeffs[base + i]) > 0.0) top = l;
    }
    const double N = std::max(top, 1);

    double best = 0.0;
    SpherePoint best_node = quad.nodes.empty() ? default_axis(F.n) : quad.nodes[0];
    for (const SpherePoint& p : quad.nodes) {
        const double v = std::abs(F.evaluate(p));
        if (v > best) {
            best = v;
            best_node = p;
        }
    }

    // Local refinement about the best node: search in the frame angles with a
    // shrinking window.
    const Frame f = make_frame(F.n, F.axis);
    const double c0 = std::clamp(dot(best_node, f.a), -1.0, 1.0);
    double theta = std::acos(c0);
    double phi = (F.n >= 3) ? std::atan2(dot(best_node, f.b2), dot(best_node, f.b1)) : 0.0;
    if (F.n == 2) theta = std::atan2(dot(best_node, f.b1), dot(best_node, f.a));

    auto rebuild = [&](double th, double ph) {
        SpherePoint p{};
        if (F.n == 2) {
            for (int k = 0; k < 4; ++k)
                p[k] = std::cos(th) * f.a[k] + std::sin(th) * f.b1[k];
        } else {
            const double cs = std::cos(th), sn = std::sin(th);
            for (int k = 0; k < 4; ++k)
                p[k] = cs * f.a[k] + sn * (std::cos(ph) * f.b1[k] + std::sin(ph) * f.b2[k]);
        }
        return p;
    };

    double wth = pi / std::max<std::size_t>(quad.size(), 8);
    double wph = wth;
    for (int pass = 0; pass < 3; ++pass) {
        double bth = theta, bph = phi;
        for (int a = -4; a <= 4; ++a) {
            const double th = theta + wth * a / 4.0;
            if (F.n == 3) {
                for (int b = -4; b <= 4; ++b) {
                    const double ph = phi + wph * b / 4.0;
                    const double v = std::abs(F.evaluate(rebuild(th, ph)));
                    if (v > best) {
                        best = v;
                        bth = th;
                        bph = ph;
                    }
                }
            } else {
                const double v = std::abs(F.evaluate(rebuild(th, phi)));
                if (v > best) {
                    best = v;
                    bth = th;
                }
            }
        }
        theta = bth;
        phi = bph;
        wth /= 6.0;
        wph /= 6.0;
    }

    return best / (std::pow(N, 0.5 * (F.n - 1)) * F.l2_norm());
}

void sphere_function_to_csv(std::ostream& out, const SphereFunction& F)
{
    out << "n,l,i,re,im\n";
    char line[128];
    for (int l = 0; l <= F.L_max; ++l) {
        const int base = flat_offset(F.n, l);
        for (int i = 0; i < basis_slots(F.n, l); ++i) {
            const complex c = F.coeffs[base + i];
            std::snprintf(line, sizeof line, "%d,%d,%d,%.17g,%.17g\n", F.n, l, i, c.real(),
                          c.imag());
            out << line;
        }
    }
}

SphereFunction sphere_function_from_csv(std::istream& in)
{
    std::string line;
    struct Rec {
        int n, l, i;
        double re, im;
    };
    std::vector<Rec> records;
    int n = -1, L_max = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Rec r{};
        char comma;
        if (!(ss >> r.n)) continue; // header or malformed line
        if (!(ss >> comma >> r.l >> comma >> r.i >> comma >> r.re >> comma >> r.im))
            fail_invalid("malformed sphere-function record: " + line);
        if (n < 0) n = r.n;
        if (r.n != n) fail_invalid("inconsistent dimension in sphere-function records");
        L_max = std::max(L_max, r.l);
        records.push_back(r);
    }
    if (n < 0) fail_invalid("no sphere-function records found");
    SphereFunction F(n, L_max);
    for (const Rec& r : records) F.at(r.l, r.i) = complex(r.re, r.im);
    return F;
}

} // namespace wplab
