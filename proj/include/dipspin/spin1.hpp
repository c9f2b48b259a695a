#pragma once

// Spin-1 algebra in the fixed basis (m = +1, 0, -1).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "units.hpp"

namespace dipspin {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Spinor = std::array<cplx, 3>;
using Mat3c = std::array<std::array<cplx, 3>, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

namespace spin1 {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

inline Mat3c fx() {
    const cplx s{inv_sqrt2, 0};
    return {{{0, s, 0}, {s, 0, s}, {0, s, 0}}};
}
inline Mat3c fy() {
    const cplx s{0, inv_sqrt2};
    return {{{0, -s, 0}, {s, 0, -s}, {0, s, 0}}};
}
inline Mat3c fz() { return {{{1, 0, 0}, {0, 0, 0}, {0, 0, -1}}}; }

inline Mat3c mul(const Mat3c& a, const Mat3c& b) {
    Mat3c c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Spinor apply(const Mat3c& u, const Spinor& v) {
    return {u[0][0] * v[0] + u[0][1] * v[1] + u[0][2] * v[2],
            u[1][0] * v[0] + u[1][1] * v[1] + u[1][2] * v[2],
            u[2][0] * v[0] + u[2][1] * v[1] + u[2][2] * v[2]};
}

/// <psi|F|psi> without normalization: a spin density.
inline Vec3 spin_density(const cplx& p, const cplx& z, const cplx& m) {
    // <F+> = sqrt2 (p* z + z* m), with F+ = Fx + i Fy
    const cplx fplus = std::sqrt(2.0) * (std::conj(p) * z + std::conj(z) * m);
    return {fplus.real(), fplus.imag(), std::norm(p) - std::norm(m)};
}

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline void require_unit_axis(const Vec3& axis) {
    units::require(std::abs(norm3(axis) - 1.0) < 1e-9, "rotation axis must be a unit vector");
}

/// exp(-i angle axis.F); rotates <F> by +angle about axis.
inline Mat3c rotation(const Vec3& axis, double angle) {
    require_unit_axis(axis);
    const auto x = fx(), y = fy(), z = fz();
    Mat3c n{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) n[i][j] = axis[0] * x[i][j] + axis[1] * y[i][j] + axis[2] * z[i][j];
    const Mat3c n2 = mul(n, n);
    const double s = std::sin(angle), c = std::cos(angle);
    Mat3c u{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            u[i][j] = (i == j ? 1.0 : 0.0) - cplx(0, s) * n[i][j] + (c - 1.0) * n2[i][j];
    return u;
}

/// The SO(3) matrix matching rotation(axis, angle) on spin expectation values.
inline Mat3 so3(const Vec3& axis, double angle) {
    require_unit_axis(axis);
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const auto [x, y, z] = axis;
    return {{{c + t * x * x, t * x * y - s * z, t * x * z + s * y},
             {t * x * y + s * z, c + t * y * y, t * y * z - s * x},
             {t * x * z - s * y, t * y * z + s * x, c + t * z * z}}};
}

inline Vec3 apply(const Mat3& r, const Vec3& v) {
    return {r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
            r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
            r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2]};
}

/// psi -> exp(-i phase (h.F + q Fz^2)) psi for a single site.
///
/// Taylor series on the 3x3 Hermitian generator with scaling so that each
/// sub-step has operator norm <= 0.5; the series is summed until the terms
/// drop below double precision, so the result is exact to rounding.
inline void propagate(Spinor& psi, const Vec3& h, double q, double phase) {
    const double bound = (norm3(h) + std::abs(q)) * std::abs(phase);
    const int substeps = std::max(1, int(std::ceil(bound / 0.5)));
    const double tau = phase / substeps;
    const cplx hm{h[0] * inv_sqrt2, -h[1] * inv_sqrt2};
    const cplx hp = std::conj(hm);
    const double dp = q + h[2], dm = q - h[2];
    const double scale =
        std::max({std::abs(psi[0]), std::abs(psi[1]), std::abs(psi[2])}) + 1e-300;

    for (int s = 0; s < substeps; ++s) {
        Spinor term = psi, acc = psi;
        for (int k = 1; k < 40; ++k) {
            const Spinor g{dp * term[0] + hm * term[1], hp * term[0] + hm * term[2],
                           hp * term[1] + dm * term[2]};
            const cplx f{0.0, -tau / k};
            term = {f * g[0], f * g[1], f * g[2]};
            acc[0] += term[0];
            acc[1] += term[1];
            acc[2] += term[2];
            const double t = std::max({std::abs(term[0].real()) + std::abs(term[0].imag()),
                                       std::abs(term[1].real()) + std::abs(term[1].imag()),
                                       std::abs(term[2].real()) + std::abs(term[2].imag())});
            if (t < 1e-18 * scale) break;
        }
        psi = acc;
    }
}

} // namespace spin1
} // namespace dipspin
