#pragma once

// Slow, independent reference computations used by the self-check and the
// test suite. None of these share code paths with the production kernel,
// FFT convolution, or split-step integrator.

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "dipole_kernel.hpp"
#include "field.hpp"
#include "spin1.hpp"

namespace dipspin::oracle {

/// Transverse-averaged dipolar tensor by adaptive quadrature over k_y of the
/// 3D transform (4pi/3)(3 khat_a khat_b - delta_ab).
inline Sym3 quasi2d_tensor_quadrature(double kx, double kz, double sigma) {
    using boost::math::quadrature::gauss_kronrod;
    const double kp2 = kx * kx + kz * kz;
    const double c = 4.0 * units::pi / 3.0;
    auto avg = [&](auto&& g) {
        // (1/2pi) int_-inf^inf dk_y exp(-k_y^2 sigma^2/2) g(k_y), g even in k_y
        auto f = [&](double ky) { return std::exp(-0.5 * ky * ky * sigma * sigma) * g(ky); };
        const double split = std::max(std::sqrt(kp2), 1e-3 / sigma);
        const double a = gauss_kronrod<double, 61>::integrate(f, 0.0, split, 15, 1e-14);
        const double b = gauss_kronrod<double, 61>::integrate(f, split, std::numeric_limits<double>::infinity(), 15, 1e-14);
        return (a + b) / units::pi;
    };
    Sym3 t;
    if (kp2 == 0.0) {
        const double one = avg([](double) { return 1.0; });
        t.xx = t.zz = -c * one;
        t.yy = 2.0 * c * one;
        return t;
    }
    const double one = avg([](double) { return 1.0; });
    const double sxx = avg([&](double ky) { return kx * kx / (kp2 + ky * ky); });
    const double szz = avg([&](double ky) { return kz * kz / (kp2 + ky * ky); });
    const double sxz = avg([&](double ky) { return kx * kz / (kp2 + ky * ky); });
    const double syy = avg([&](double ky) { return ky * ky / (kp2 + ky * ky); });
    t.xx = c * (3.0 * sxx - one);
    t.zz = c * (3.0 * szz - one);
    t.yy = c * (3.0 * syy - one);
    t.xz = c * 3.0 * sxz;
    return t;
}

/// Direct evaluation of b(r) = -c_dd sum_r' K(r - r') M(r') dA, where the
/// periodic lattice kernel K is synthesized mode by mode with explicit
/// trigonometric sums (no FFT) from the quadrature tensor. O(N^2) per
/// component pair; meant for grids up to ~24x24.
inline std::array<RVec, 3> direct_sum_field(const Grid2D& g, double sigma, KernelMode mode, double c_dd,
                                            const MagnetizationField& m) {
    require_same_grid(g, m.grid);
    std::array<RVec, 3> b;
    for (auto& c : b) c.assign(g.size(), 0.0);
    if (mode == KernelMode::off) return b;

    std::vector<Sym3> qk(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            Sym3 t = quasi2d_tensor_quadrature(g.kx(i), g.kz(j), sigma);
            // Nyquist convention: +k_N and -k_N are the same lattice mode, so
            // the part odd in either component is dropped there
            if (2 * i == g.nx || 2 * j == g.nz) t.xz = 0.0;
            if (mode == KernelMode::larmor) {
                Sym3 a;
                a.xx = a.yy = 0.5 * (t.xx + t.yy);
                a.zz = t.zz;
                t = a;
            }
            qk[g.index(i, j)] = t;
        }
    // K(dx, dz) = (1/A) sum_k Q(k) cos(k.dr), on every lattice displacement
    const double inv_area = 1.0 / (g.lx * g.lz);
    std::vector<Sym3> kr(g.size());
    for (int a = 0; a < g.nx; ++a)
        for (int c = 0; c < g.nz; ++c) {
            Sym3 s;
            const double rx = a * g.dx(), rz = c * g.dz();
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.nz; ++j) {
                    const double w = std::cos(g.kx(i) * rx + g.kz(j) * rz);
                    const Sym3& q = qk[g.index(i, j)];
                    s.xx += w * q.xx;
                    s.yy += w * q.yy;
                    s.zz += w * q.zz;
                    s.xy += w * q.xy;
                    s.xz += w * q.xz;
                    s.yz += w * q.yz;
                }
            kr[g.index(a, c)] = s.scaled(inv_area);
        }
    const double da = g.cell_area();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            double acc[3] = {0, 0, 0};
            for (int i2 = 0; i2 < g.nx; ++i2)
                for (int j2 = 0; j2 < g.nz; ++j2) {
                    const Sym3& k = kr[g.index((i - i2 + g.nx) % g.nx, (j - j2 + g.nz) % g.nz)];
                    const auto s = g.index(i2, j2);
                    const auto v = k.apply(m.m[0][s], m.m[1][s], m.m[2][s]);
                    acc[0] += v[0];
                    acc[1] += v[1];
                    acc[2] += v[2];
                }
            for (int c = 0; c < 3; ++c) b[c][g.index(i, j)] = -c_dd * da * acc[c];
        }
    return b;
}

/// Uniform 32-point average of R_z(phi)^T Q R_z(phi).
inline Sym3 larmor_average_numeric(const Sym3& q, int points = 32) {
    double acc[3][3] = {};
    const double m[3][3] = {{q.xx, q.xy, q.xz}, {q.xy, q.yy, q.yz}, {q.xz, q.yz, q.zz}};
    for (int p = 0; p < points; ++p) {
        const double phi = 2.0 * units::pi * p / points;
        const double r[3][3] = {{std::cos(phi), -std::sin(phi), 0}, {std::sin(phi), std::cos(phi), 0}, {0, 0, 1}};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double s = 0;
                for (int c = 0; c < 3; ++c)
                    for (int d = 0; d < 3; ++d) s += r[c][a] * m[c][d] * r[d][b];
                acc[a][b] += s / points;
            }
    }
    return {acc[0][0], acc[1][1], acc[2][2], acc[0][1], acc[0][2], acc[1][2]};
}

/// On-axis dipolar energy (h*Hz) of an atom in an infinite helix column,
/// integrated in real space. The atom sits at the origin with spin along x;
/// the gas has density n0 exp(-rho^2/2 sigma^2) and spin (cos kz, sin kz, 0).
/// The azimuthal integral of (1 - 3 rhat_x^2) is done in closed form; the
/// subtracted uniform term integrates to zero over every shell and only
/// regularizes r -> 0.
inline double helix_column_energy_3d(double kappa, double sigma, double n0_um3, double c_dd) {
    using boost::math::quadrature::gauss_kronrod;
    auto shell = [&](double r) {
        auto f = [&](double th) {
            const double s = std::sin(th), c = std::cos(th);
            const double rho = r * s;
            const double dens = std::exp(-0.5 * rho * rho / (sigma * sigma)) * std::cos(kappa * r * c);
            return s * (1.0 - 1.5 * s * s) * (dens - 1.0);
        };
        // integrand symmetric about pi/2; resolve the narrow lobe near the axis
        const double edge = std::min(0.5 * units::pi, 20.0 * sigma / std::max(r, 1e-12));
        double v = gauss_kronrod<double, 31>::integrate(f, 0.0, edge, 12, 1e-12);
        if (edge < 0.5 * units::pi) v += gauss_kronrod<double, 31>::integrate(f, edge, 0.5 * units::pi, 12, 1e-12);
        return 2.0 * 2.0 * units::pi * v / r;
    };
    double total = 0;
    double a = 0;
    for (double b : {sigma, 4 * sigma, 16 * sigma, 64 * sigma, 256 * sigma, 1024 * sigma, 4096 * sigma}) {
        total += gauss_kronrod<double, 61>::integrate(shell, a, b, 15, 1e-10);
        a = b;
    }
    return c_dd * n0_um3 * total;
}

/// Single-site (homogeneous) spin-1 mean-field dynamics
///   i dpsi/dt = 2pi 1e-3 [c0 n + c2 F(psi).F + q Fz^2 + gz Fz] psi
/// integrated with an adaptive Dormand-Prince scheme. t in ms, energies in Hz.
inline Spinor single_site_evolve(Spinor psi, double c0, double c2, double q, double gz, double t_ms) {
    using State = std::array<double, 6>;
    State y{psi[0].real(), psi[0].imag(), psi[1].real(), psi[1].imag(), psi[2].real(), psi[2].imag()};
    auto rhs = [&](const State& s, State& dy, double) {
        const Spinor v{cplx(s[0], s[1]), cplx(s[2], s[3]), cplx(s[4], s[5])};
        const double n = std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
        // F+ = sqrt2 (p* z + z* m), Fz = |p|^2 - |m|^2
        const cplx fp = std::sqrt(2.0) * (std::conj(v[0]) * v[1] + std::conj(v[1]) * v[2]);
        const double fx = fp.real(), fy = fp.imag(), fz = std::norm(v[0]) - std::norm(v[2]);
        const double hx = c2 * fx, hy = c2 * fy, hz = c2 * fz + gz;
        const cplx hminus(hx, -hy); // h.F = hz Fz + (h- F+ + h+ F-)/2
        const double r2 = 1.0 / std::sqrt(2.0);
        Spinor hv;
        hv[0] = (c0 * n + hz + q) * v[0] + r2 * hminus * v[1];
        hv[1] = c0 * n * v[1] + r2 * std::conj(hminus) * v[0] + r2 * hminus * v[2];
        hv[2] = (c0 * n - hz + q) * v[2] + r2 * std::conj(hminus) * v[1];
        const double w = units::rad_per_hz_ms;
        for (int m = 0; m < 3; ++m) {
            const cplx d = cplx(0, -w) * hv[m];
            dy[2 * m] = d.real();
            dy[2 * m + 1] = d.imag();
        }
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, y, 0.0, t_ms, 1e-3);
    return {cplx(y[0], y[1]), cplx(y[2], y[3]), cplx(y[4], y[5])};
}

} // namespace dipspin::oracle
