#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "units.hpp"

namespace dipspin {

enum class KernelMode { bare, larmor, off };

inline KernelMode parse_kernel_mode(const std::string& v) {
    if (v == "bare") return KernelMode::bare;
    if (v == "larmor" || v == "larmor-averaged") return KernelMode::larmor;
    if (v == "off") return KernelMode::off;
    throw InvalidParameter("unknown kernel mode '" + v + "' (expected bare|larmor|off)");
}

inline std::string to_string(KernelMode m) {
    switch (m) {
    case KernelMode::bare: return "bare";
    case KernelMode::larmor: return "larmor";
    case KernelMode::off: return "off";
    }
    return "?";
}

/// Real symmetric 3x3 tensor, spin components (x, y, z).
struct Sym3 {
    double xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;

    double trace() const { return xx + yy + zz; }
    template <class V>
    std::array<V, 3> apply(const V& x, const V& y, const V& z) const {
        return {xx * x + xy * y + xz * z, xy * x + yy * y + yz * z, xz * x + yz * y + zz * z};
    }
    Sym3 scaled(double f) const { return {f * xx, f * yy, f * zz, f * xy, f * xz, f * yz}; }
};

/// exp(w^2) erfc(w) for w >= 0.
inline double erfcx(double w) {
    if (w < 5.0) return std::exp(w * w) * std::erfc(w);
    // Continued fraction: sqrt(pi) erfcx(w) = 1/(w + (1/2)/(w + 1/(w + (3/2)/(w + ...))))
    double f = w;
    for (int n = 60; n >= 1; --n) f = w + 0.5 * n / f;
    return 1.0 / (std::sqrt(units::pi) * f);
}

/// Dipolar tensor (4pi/3)(3 khat khat - 1) averaged over k_y with the
/// weight of a transverse wavefunction exp(-y^2/2 sigma^2), i.e.
/// (1/2pi) int dk_y exp(-k_y^2 sigma^2 / 2) [...], done in closed form.
/// Carries units of 1/um.
inline Sym3 quasi2d_tensor(double kx, double kz, double sigma) {
    const double weight = 1.0 / (std::sqrt(2.0 * units::pi) * sigma);
    const double c = 4.0 * units::pi / 3.0 * weight;
    const double kperp2 = kx * kx + kz * kz;
    Sym3 t;
    if (kperp2 == 0.0) {
        // in-plane part of khat vanishes after the transverse average
        t.xx = t.zz = -c;
        t.yy = 2.0 * c;
        return t;
    }
    const double w = std::sqrt(kperp2) * sigma / std::sqrt(2.0);
    const double f = std::sqrt(units::pi) * w * erfcx(w); // <k_perp^2 / k^2>
    t.xx = c * (3.0 * f * kx * kx / kperp2 - 1.0);
    t.zz = c * (3.0 * f * kz * kz / kperp2 - 1.0);
    t.xz = c * 3.0 * f * kx * kz / kperp2;
    t.yy = c * (2.0 - 3.0 * f);
    return t;
}

/// Average of R_z(phi)^T Q R_z(phi) over phi: the part of the interaction
/// that survives fast Larmor precession about z.
inline Sym3 larmor_average(const Sym3& q) {
    Sym3 t;
    t.xx = t.yy = 0.5 * (q.xx + q.yy);
    t.zz = q.zz;
    return t;
}

/// Momentum-space dipolar tensor per mode on the r2c half spectrum
/// (nx * (nz/2 + 1)), together with the coupling c_dd.
class DipoleKernel {
public:
    DipoleKernel() = default;

    static DipoleKernel build(const Grid2D& g, double sigma_y, KernelMode mode, double c_dd) {
        g.validate();
        units::require(sigma_y > 0, "sigma_y must be positive");
        DipoleKernel k;
        k.grid_ = g;
        k.mode_ = mode;
        k.sigma_y_ = sigma_y;
        k.c_dd_ = c_dd;
        const int nzh = g.nz / 2 + 1;
        k.q_.assign(std::size_t(g.nx) * nzh, Sym3{});
        if (mode == KernelMode::off) return k;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < nzh; ++j) {
                Sym3 t = quasi2d_tensor(g.kx(i), g.kz(j), sigma_y);
                // k and -k alias on a Nyquist line; the odd xz part has no
                // consistent real-field meaning there
                if (2 * i == g.nx || 2 * j == g.nz) t.xz = 0.0;
                if (mode == KernelMode::larmor) t = larmor_average(t);
                k.q_[std::size_t(i) * nzh + j] = t;
            }
        return k;
    }

    const Grid2D& grid() const { return grid_; }
    KernelMode mode() const { return mode_; }
    double sigma_y() const { return sigma_y_; }
    double c_dd() const { return c_dd_; }
    int half_nz() const { return grid_.nz / 2 + 1; }

    /// Tensor at full-spectrum mode (i, j), using Q(-k) = Q(k).
    const Sym3& tensor(int i, int j) const {
        if (j >= half_nz()) {
            j = grid_.nz - j;
            i = (grid_.nx - i) % grid_.nx;
        }
        return q_[std::size_t(i) * half_nz() + j];
    }
    const std::vector<Sym3>& half_spectrum() const { return q_; }

    /// Same kernel with the sign flipped; only used as a negative control.
    DipoleKernel negated() const {
        DipoleKernel k = *this;
        for (auto& t : k.q_) t = t.scaled(-1.0);
        return k;
    }

private:
    Grid2D grid_;
    KernelMode mode_ = KernelMode::off;
    double sigma_y_ = 1.0;
    double c_dd_ = 0.0;
    std::vector<Sym3> q_;
};

inline DipoleKernel build_kernel(const Grid2D& g, double sigma_y, KernelMode mode, double c_dd) {
    return DipoleKernel::build(g, sigma_y, mode, c_dd);
}

/// Evaluates the dipolar effective field by FFT convolution. Holds scratch
/// buffers, so one instance per trajectory.
///
/// Sign convention: b = -c_dd * Q * M, the atom energy is -b.F, and the
/// total energy is -1/2 sum b.M dA. Two parallel spins side by side
/// (perpendicular to their separation) repel; head-to-tail spins attract.
class DipolarSolver {
public:
    explicit DipolarSolver(const DipoleKernel& k)
        : kernel_(&k), fft_(k.grid().nx, k.grid().nz) {
        for (auto& h : spec_) h.assign(fft_.half_size(), cplx{});
    }

    const DipoleKernel& kernel() const { return *kernel_; }

    /// b from spin density components (mx, my, mz). Output arrays are resized.
    void field(const std::array<const double*, 3>& m, std::array<RVec, 3>& b) {
        const std::size_t n = fft_.size();
        for (auto& c : b) c.resize(n);
        if (kernel_->mode() == KernelMode::off) {
            for (auto& c : b) std::fill(c.begin(), c.end(), 0.0);
            return;
        }
        for (int c = 0; c < 3; ++c) fft_.forward_real(m[c], spec_[c].data());
        const auto& q = kernel_->half_spectrum();
        const double f = -kernel_->c_dd() / double(n);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const auto out = q[k].apply(spec_[0][k], spec_[1][k], spec_[2][k]);
            spec_[0][k] = f * out[0];
            spec_[1][k] = f * out[1];
            spec_[2][k] = f * out[2];
        }
        for (int c = 0; c < 3; ++c) fft_.backward_real(spec_[c].data(), b[c].data());
    }

    std::array<RVec, 3> field(const MagnetizationField& mag) {
        require_same_grid(mag.grid, kernel_->grid());
        std::array<RVec, 3> b;
        field({mag.m[0].data(), mag.m[1].data(), mag.m[2].data()}, b);
        return b;
    }

    /// Total dipolar energy (h*Hz) as the quadratic form in momentum space.
    double spectral_energy(const MagnetizationField& mag) {
        require_same_grid(mag.grid, kernel_->grid());
        if (kernel_->mode() == KernelMode::off) return 0.0;
        for (int c = 0; c < 3; ++c) fft_.forward_real(mag.m[c].data(), spec_[c].data());
        const auto& q = kernel_->half_spectrum();
        const int nzh = kernel_->half_nz(), nz = mag.grid.nz;
        double sum = 0;
        for (int i = 0; i < mag.grid.nx; ++i)
            for (int j = 0; j < nzh; ++j) {
                const std::size_t k = std::size_t(i) * nzh + j;
                const auto out = q[k].apply(spec_[0][k], spec_[1][k], spec_[2][k]);
                const double v = (std::conj(spec_[0][k]) * out[0] + std::conj(spec_[1][k]) * out[1] +
                                  std::conj(spec_[2][k]) * out[2]).real();
                sum += (j == 0 || 2 * j == nz) ? v : 2.0 * v;
            }
        const double n = double(mag.grid.size());
        return 0.5 * kernel_->c_dd() * mag.grid.cell_area() / n * sum;
    }

private:
    const DipoleKernel* kernel_;
    Fft2D fft_;
    std::array<CVec, 3> spec_;
};

inline std::array<RVec, 3> dipolar_field(const DipoleKernel& k, const MagnetizationField& m) {
    DipolarSolver solver(k);
    return solver.field(m);
}

/// -1/2 sum_r b(r).M(r) dx dz, in h*Hz.
inline double dipolar_energy(const DipoleKernel& k, const MagnetizationField& m) {
    const auto b = dipolar_field(k, m);
    double sum = 0;
    for (std::size_t s = 0; s < m.grid.size(); ++s)
        sum += b[0][s] * m.m[0][s] + b[1][s] * m.m[1][s] + b[2][s] * m.m[2][s];
    return -0.5 * sum * m.grid.cell_area();
}

/// On-axis dipolar energy (h*Hz) of one atom in an infinite column with
/// Gaussian transverse density n0 exp(-rho^2 / 2 sigma^2), magnetized as a
/// transverse helix of wavevector kappa along the axis. Reduces to a single
/// integral over u = k_perp^2 sigma^2 / 2.
inline double helix_column_energy(double kappa, double sigma, double n0_um3, double c_dd) {
    units::require(sigma > 0, "sigma must be positive");
    const double a = 0.5 * kappa * kappa * sigma * sigma;
    boost::math::quadrature::exp_sinh<double> integrator;
    const double integral = integrator.integrate(
        [a](double u) { return std::exp(-u) * (1.5 * u / (u + a) - 1.0); }, 0.0,
        std::numeric_limits<double>::infinity());
    return c_dd * 4.0 * units::pi / 3.0 * n0_um3 * integral;
}

} // namespace dipspin
