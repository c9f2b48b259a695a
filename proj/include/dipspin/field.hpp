#pragma once

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "fft.hpp"
#include "grid.hpp"
#include "params.hpp"
#include "spin1.hpp"

namespace dipspin {

/// Three complex amplitudes (m = +1, 0, -1) per site. |psi|^2 is a column
/// density in atoms/um^2, so sum(|psi|^2) * dx * dz is the atom number.
struct SpinorField {
    Grid2D grid;
    std::array<CVec, 3> psi;

    SpinorField() = default;
    explicit SpinorField(const Grid2D& g) : grid(g) {
        for (auto& c : psi) c.assign(g.size(), cplx{});
    }

    Spinor at(std::size_t s) const { return {psi[0][s], psi[1][s], psi[2][s]}; }
    void set(std::size_t s, const Spinor& v) {
        psi[0][s] = v[0];
        psi[1][s] = v[1];
        psi[2][s] = v[2];
    }
    double density(std::size_t s) const {
        return std::norm(psi[0][s]) + std::norm(psi[1][s]) + std::norm(psi[2][s]);
    }
    double norm() const {
        double sum = 0;
        for (std::size_t s = 0; s < grid.size(); ++s) sum += density(s);
        return sum * grid.cell_area();
    }
    bool finite() const {
        for (const auto& c : psi)
            for (const auto& v : c)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
    void scale(double f) {
        for (auto& c : psi)
            for (auto& v : c) v *= f;
    }
};

/// Spin density M = psi^dag F psi (units of g_F mu_B per um^2) and column density n.
struct MagnetizationField {
    Grid2D grid;
    std::array<RVec, 3> m;
    RVec n;

    MagnetizationField() = default;
    explicit MagnetizationField(const Grid2D& g) : grid(g), n(g.size(), 0.0) {
        for (auto& c : m) c.assign(g.size(), 0.0);
    }
    Vec3 at(std::size_t s) const { return {m[0][s], m[1][s], m[2][s]}; }
    double transverse(std::size_t s) const { return std::hypot(m[0][s], m[1][s]); }
};

inline MagnetizationField magnetization(const SpinorField& s) {
    MagnetizationField out(s.grid);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        const Vec3 f = spin1::spin_density(s.psi[0][i], s.psi[1][i], s.psi[2][i]);
        out.m[0][i] = f[0];
        out.m[1][i] = f[1];
        out.m[2][i] = f[2];
        out.n[i] = s.density(i);
    }
    return out;
}

inline void rotate_spin_inplace(SpinorField& s, const Vec3& axis, double angle) {
    const Mat3c u = spin1::rotation(axis, angle);
    for (std::size_t i = 0; i < s.grid.size(); ++i) s.set(i, spin1::apply(u, s.at(i)));
}

/// Global spin rotation exp(-i angle axis.F) at every site.
inline SpinorField rotate_spin(SpinorField s, const Vec3& axis, double angle) {
    rotate_spin_inplace(s, axis, angle);
    return s;
}

/// psi_m -> exp(sign * i m kappa z) psi_m. With sign = -1 the transverse
/// angle arg(Mx + i My) advances as +kappa z.
inline constexpr int helix_phase_sign = -1;

inline SpinorField imprint_helix(SpinorField s, double kappa) {
    const auto& g = s.grid;
    for (int j = 0; j < g.nz; ++j) {
        const cplx w = std::polar(1.0, helix_phase_sign * kappa * g.z(j));
        const cplx wc = std::conj(w);
        for (int i = 0; i < g.nx; ++i) {
            const auto k = g.index(i, j);
            s.psi[0][k] *= w;
            s.psi[2][k] *= wc;
        }
    }
    return s;
}

enum class Profile { uniform, thomas_fermi };

inline Profile parse_profile(const std::string& v) {
    if (v == "uniform") return Profile::uniform;
    if (v == "thomas-fermi") return Profile::thomas_fermi;
    throw InvalidParameter("unknown profile '" + v + "' (expected uniform|thomas-fermi)");
}
inline std::string to_string(Profile p) { return p == Profile::uniform ? "uniform" : "thomas-fermi"; }

/// Harmonic coefficients (Hz/um^2) of the in-plane trap, V = ax x^2 + az z^2.
inline std::array<double, 2> trap_coefficients(const PhysicalParams& p) {
    const double f = p.mass_kg / (2.0 * units::planck) * units::um * units::um;
    return {f * p.trap_angular[0] * p.trap_angular[0], f * p.trap_angular[2] * p.trap_angular[2]};
}

/// Chemical potential (Hz) and radii (um) of the quasi-2D Thomas-Fermi
/// column for a fully magnetized gas with coupling c0' + c2'.
struct ThomasFermi2D {
    double mu_hz;
    double rx_um;
    double rz_um;
    double coupling; // Hz um^2
};

inline ThomasFermi2D thomas_fermi_2d(const PhysicalParams& p) {
    const DerivedParams d = derive_params(p);
    const auto [ax, az] = trap_coefficients(p);
    units::require(ax > 0 && az > 0, "thomas-fermi profile needs nonzero in-plane trap frequencies");
    const double g = d.c0_2d + d.c2_2d;
    units::require(g > 0, "effective contact coupling must be repulsive");
    // N = (pi/2) mu^2 / (g sqrt(ax az))
    const double mu = std::sqrt(2.0 * p.atom_number * g * std::sqrt(ax * az) / units::pi);
    return {mu, std::sqrt(mu / ax), std::sqrt(mu / az), g};
}

struct PrepareOptions {
    double box_fraction = 0.8; // uniform profile: box size as a fraction of the domain
};

/// All atoms in m_F = -1, with a flat soft-edged or Thomas-Fermi column
/// density normalized to atom_number.
inline SpinorField prepare_initial(const PhysicalParams& p, const Grid2D& g, Profile profile,
                                   const PrepareOptions& opt = {}) {
    p.validate();
    g.validate();
    SpinorField s(g);
    RVec n(g.size(), 0.0);
    if (profile == Profile::thomas_fermi) {
        const auto tf = thomas_fermi_2d(p);
        if (tf.rx_um >= g.lx / 2 || tf.rz_um >= g.lz / 2)
            throw InvalidParameter("grid too small for the Thomas-Fermi radii (rx=" +
                                   std::to_string(tf.rx_um) + " um, rz=" + std::to_string(tf.rz_um) +
                                   " um)");
        const auto [ax, az] = trap_coefficients(p);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nz; ++j) {
                const double v = ax * g.x(i) * g.x(i) + az * g.z(j) * g.z(j);
                n[g.index(i, j)] = std::max(0.0, (tf.mu_hz - v) / tf.coupling);
            }
    } else {
        units::require(opt.box_fraction > 0 && opt.box_fraction <= 1, "box_fraction must be in (0, 1]");
        // tanh ramp of one cell width: 2% -> 98% over four cells
        const double hx = 0.5 * opt.box_fraction * g.lx, hz = 0.5 * opt.box_fraction * g.lz;
        auto edge = [](double half, double c, double cell) {
            return 0.5 * (1.0 + std::tanh((half - std::abs(c)) / cell));
        };
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nz; ++j)
                n[g.index(i, j)] = edge(hx, g.x(i), g.dx()) * edge(hz, g.z(j), g.dz());
    }
    double sum = 0;
    for (double v : n) sum += v;
    const double scale = p.atom_number / (sum * g.cell_area());
    for (std::size_t k = 0; k < g.size(); ++k) s.psi[2][k] = std::sqrt(n[k] * scale);
    return s;
}

/// Adds complex white noise of relative amplitude `amplitude` to every
/// component (scaled by the local sqrt(n)) and restores the atom number.
template <class Rng>
void add_spin_noise(SpinorField& s, double amplitude, Rng& rng) {
    if (amplitude <= 0) return;
    const double before = s.norm();
    std::normal_distribution<double> gauss(0.0, amplitude / std::sqrt(2.0));
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
        const double r = std::sqrt(s.density(k));
        for (auto& c : s.psi) c[k] += r * cplx(gauss(rng), gauss(rng));
    }
    s.scale(std::sqrt(before / s.norm()));
}

} // namespace dipspin
