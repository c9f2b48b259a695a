#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "dipole_kernel.hpp"
#include "dynamics.hpp"
#include "oracles.hpp"
#include "rng.hpp"

namespace dipspin {

struct CheckResult {
    std::string name;
    double error;
    double tolerance;
    bool pass() const { return error <= tolerance; }
};

struct SelfcheckOptions {
    bool tamper_kernel_sign = false; // negative control: flips the production kernel
};

namespace detail {

inline double max_rel_diff(const std::array<RVec, 3>& a, const std::array<RVec, 3>& b) {
    double err = 0, scale = 0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < a[c].size(); ++k) {
            err = std::max(err, std::abs(a[c][k] - b[c][k]));
            scale = std::max(scale, std::abs(b[c][k]));
        }
    return scale > 0 ? err / scale : err;
}

inline DipoleKernel production_kernel(const Grid2D& g, double sigma, KernelMode mode, double c_dd,
                                      const SelfcheckOptions& opt) {
    auto k = build_kernel(g, sigma, mode, c_dd);
    return opt.tamper_kernel_sign ? k.negated() : k;
}

inline MagnetizationField random_magnetization(const Grid2D& g, std::uint64_t seed) {
    auto rng = make_stream(seed, Stream::synthetic);
    std::normal_distribution<double> gauss;
    MagnetizationField m(g);
    for (auto& c : m.m)
        for (auto& v : c) v = gauss(rng);
    return m;
}

} // namespace detail

/// FFT dipolar field vs direct lattice sum, for both non-trivial modes.
inline CheckResult check_direct_sum(const PhysicalParams& p, KernelMode mode, const SelfcheckOptions& opt = {}) {
    const Grid2D g{16, 16, 20.0, 24.0};
    const double c_dd = derive_params(p).c_dd;
    const auto m = detail::random_magnetization(g, 7);
    const auto kernel = detail::production_kernel(g, p.sigma_y_um, mode, c_dd, opt);
    DipolarSolver fft(kernel);
    const auto fast = fft.field(m);
    const auto slow = oracle::direct_sum_field(g, p.sigma_y_um, mode, c_dd, m);
    return {"dipolar field FFT vs direct sum (" + to_string(mode) + ", 16x16)", detail::max_rel_diff(fast, slow), 1e-6};
}

/// Two magnetized cells 3 um apart along x, well inside a 32 um periodic
/// box: spins along z (side by side) must repel, spins along x (head to
/// tail) must attract, and both pair energies must match the oracle.
inline CheckResult check_sign_audit(const PhysicalParams& p, const SelfcheckOptions& opt = {}) {
    const Grid2D g{32, 32, 32.0, 32.0};
    const double c_dd = derive_params(p).c_dd;
    const auto kernel = detail::production_kernel(g, p.sigma_y_um, KernelMode::bare, c_dd, opt);
    auto cells = [&](std::initializer_list<int> is, int comp) {
        MagnetizationField m(g);
        for (int i : is) m.m[comp][g.index(i, 16)] = 1.0;
        return m;
    };
    auto oracle_energy = [&](const MagnetizationField& m) {
        const auto b = oracle::direct_sum_field(g, p.sigma_y_um, KernelMode::bare, c_dd, m);
        double e = 0;
        for (std::size_t s = 0; s < g.size(); ++s)
            e -= 0.5 * (b[0][s] * m.m[0][s] + b[1][s] * m.m[1][s] + b[2][s] * m.m[2][s]);
        return e * g.cell_area();
    };
    double err = 0;
    for (int comp : {2, 0}) {
        const double pair = dipolar_energy(kernel, cells({14, 17}, comp)) - dipolar_energy(kernel, cells({14}, comp)) -
                            dipolar_energy(kernel, cells({17}, comp));
        const double ref = oracle_energy(cells({14, 17}, comp)) - oracle_energy(cells({14}, comp)) -
                           oracle_energy(cells({17}, comp));
        const double expected_sign = comp == 2 ? 1.0 : -1.0;
        if (!(pair * expected_sign > 0) || !(ref * expected_sign > 0)) return {"sign audit: side-by-side repel, head-to-tail attract", std::numeric_limits<double>::infinity(), 1e-6};
        err = std::max(err, std::abs(pair - ref) / std::abs(ref));
    }
    return {"sign audit: side-by-side repel, head-to-tail attract", err, 1e-6};
}

/// Precession-averaged kernel vs a 32-point numeric average of rotated bare tensors.
inline CheckResult check_larmor_average(const PhysicalParams& p) {
    const Grid2D g{64, 64, 48.0, 96.0};
    const auto bare = build_kernel(g, p.sigma_y_um, KernelMode::bare, 1.0);
    const auto avg = build_kernel(g, p.sigma_y_um, KernelMode::larmor, 1.0);
    double err = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const Sym3 a = avg.tensor(i, j), b = oracle::larmor_average_numeric(bare.tensor(i, j), 32);
            for (double d : {a.xx - b.xx, a.yy - b.yy, a.zz - b.zz, a.xy - b.xy, a.xz - b.xz, a.yz - b.yz})
                err = std::max(err, std::abs(d));
        }
    return {"larmor-averaged kernel vs 32-point phi average", err, 1e-10};
}

/// 1D helix-column quadrature vs real-space 3D integration, three pitches.
inline CheckResult check_helix_column(const PhysicalParams& p) {
    const auto d = derive_params(p);
    double err = 0;
    for (double pitch : {150.0, 60.0, 10.0}) {
        const double k = 2.0 * units::pi / pitch;
        const double a = helix_column_energy(k, p.sigma_y_um, d.n0_um3, d.c_dd);
        const double b = oracle::helix_column_energy_3d(k, p.sigma_y_um, d.n0_um3, d.c_dd);
        err = std::max(err, std::abs(a - b) / std::abs(b));
    }
    return {"helix column energy: quadrature vs 3D integration", err, 0.05};
}

/// Homogeneous state under contact + quadratic Zeeman: split-step vs an
/// adaptive ODE integration of the on-site three-level problem.
inline CheckResult check_single_site(const PhysicalParams& p) {
    const Grid2D g{8, 8, 16.0, 16.0};
    EvolutionConfig cfg;
    cfg.kernel_mode = KernelMode::off;
    cfg.potential = Potential::none;
    const Model model = Model::from(p, g, cfg);
    const auto kernel = build_kernel(g, p.sigma_y_um, KernelMode::off, 0.0);
    const double n = 500.0, t_final = 20.0, dt = 0.01;
    Spinor v{0.5 * std::sqrt(n), std::sqrt(0.5 * n), 0.5 * std::sqrt(n)};
    v = spin1::apply(spin1::rotation({0, 1, 0}, 0.3), v); // tilt out of plane for non-trivial dynamics
    SpinorField s(g);
    for (std::size_t k = 0; k < g.size(); ++k) s.set(k, v);
    SplitStepper stepper(model, kernel, dt);
    for (int i = 0, steps = int(std::lround(t_final / dt)); i < steps; ++i) stepper.step(s);
    const Spinor ref = oracle::single_site_evolve(v, model.c0, model.c2, model.q_hz, 0.0, t_final);
    double err = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int m = 0; m < 3; ++m) err = std::max(err, std::abs(s.psi[m][k] - ref[m]) / std::sqrt(n));
    return {"single-site dynamics vs ODE integration (20 ms)", err, 1e-8};
}

/// Sum of diagonal kernel entries at every mode (traceless 3D tensor).
inline CheckResult check_kernel_trace(const PhysicalParams& p) {
    const Grid2D g{64, 64, 48.0, 96.0};
    const auto k = build_kernel(g, p.sigma_y_um, KernelMode::bare, 1.0);
    double err = 0;
    for (const auto& t : k.half_spectrum()) err = std::max(err, std::abs(t.trace()));
    return {"bare kernel trace at every mode", err, 1e-12};
}

struct SelfcheckReport {
    std::vector<CheckResult> checks;
    double seconds = 0;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
};

inline SelfcheckReport run_selfcheck(const PhysicalParams& p = {}, const SelfcheckOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    SelfcheckReport r;
    r.checks.push_back(check_direct_sum(p, KernelMode::bare, opt));
    r.checks.push_back(check_direct_sum(p, KernelMode::larmor, opt));
    r.checks.push_back(check_sign_audit(p, opt));
    r.checks.push_back(check_larmor_average(p));
    r.checks.push_back(check_kernel_trace(p));
    r.checks.push_back(check_helix_column(p));
    r.checks.push_back(check_single_site(p));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace dipspin
