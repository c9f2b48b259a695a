#pragma once

#include <array>
#include <cmath>

#include "units.hpp"

namespace dipspin {

/// Experiment-level inputs for an F=1 87Rb condensate in a single-beam trap.
/// Values are kept in the units an experimentalist quotes them in; the
/// conversion to the internal (um, ms, h*Hz) system happens in derive_params.
struct PhysicalParams {
    double a0_nm = 5.39;        // spin-0 channel scattering length
    double a2_nm = 5.31;        // spin-2 channel scattering length
    double n0_cm3 = 2.3e14;     // peak 3D density
    double atom_number = 2.3e6;
    double B0_mG = 165.0;
    std::array<double, 3> trap_angular{2.0 * units::pi * 39.0, 2.0 * units::pi * 440.0,
                                       2.0 * units::pi * 4.2}; // (wx, wy, wz), s^-1
    // Transverse Gaussian width. The transverse wavefunction is taken as
    // exp(-y^2 / (2 sigma_y^2)), so the density-weighted mean 3D density of a
    // column is ncol / (sqrt(2 pi) sigma_y). Default rms-matches r_y = 1.8 um.
    double sigma_y_um = 1.8 / std::sqrt(5.0);
    double q_coeff_hz_per_g2 = 71.6;
    double mass_kg = units::rb87_mass;
    double gF = 0.5;

    void validate() const {
        using units::require;
        require(a0_nm > 0 && a2_nm > 0, "scattering lengths must be positive");
        require(n0_cm3 > 0, "n0 must be positive");
        require(atom_number > 0, "atom_number must be positive");
        require(mass_kg > 0, "mass must be positive");
        require(sigma_y_um > 0, "sigma_y must be positive");
        require(B0_mG >= 0, "B0 must be non-negative");
        require(q_coeff_hz_per_g2 >= 0, "q_coeff must be non-negative");
        for (double w : trap_angular) require(w >= 0, "trap frequencies must be non-negative");
        require(std::isfinite(a0_nm + a2_nm + n0_cm3 + atom_number + B0_mG + sigma_y_um + gF),
                "parameters must be finite");
    }

    static PhysicalParams reference() { return {}; }
};

/// Closed-form quantities derived from PhysicalParams, in internal units.
struct DerivedParams {
    double abar_nm = 0;
    double delta_a_nm = 0;      // signed; negative means ferromagnetic
    double a_d_nm = 0;
    double c0 = 0;              // h*Hz*um^3
    double c2 = 0;              // h*Hz*um^3
    double c_dd = 0;            // mu0 (gF muB)^2 / (4 pi), h*Hz*um^3
    double c0_2d = 0;           // c0 / (sqrt(2 pi) sigma_y), h*Hz*um^2
    double c2_2d = 0;
    double xi_s_um = 0;         // spin healing length
    double q_hz = 0;            // quadratic Zeeman energy
    double e_d_hz = 0;          // mu0 gF^2 muB^2 n0 / 2
    double larmor_hz = 0;       // documentation only; dynamics run in the rotating frame
    double n0_um3 = 0;
    double column_peak_um2 = 0; // sqrt(2 pi) sigma_y n0
    double hbar_over_m = 0;     // um^2/ms
    double zeeman_hz_per_mG = 0; // gF muB / h
};

/// q = q_coeff * B0^2, in h*Hz.
inline double quadratic_zeeman(double B0_mG, double q_coeff_hz_per_g2 = 71.6) {
    units::require(B0_mG >= 0, "B0 must be non-negative");
    const double b_gauss = B0_mG * 1e-3;
    return q_coeff_hz_per_g2 * b_gauss * b_gauss;
}

/// Helix wavevector (rad/um) imprinted by a gradient pulse of duration tau_p.
inline double helix_wavevector(double gradient_mG_per_cm, double tau_p_ms, double gF = 0.5) {
    units::require(tau_p_ms > 0, "tau_p must be positive");
    const double grad_T_per_m = gradient_mG_per_cm * units::milligauss / 1e-2;
    const double kappa_per_m =
        gF * units::bohr_magneton / units::hbar * grad_T_per_m * tau_p_ms * units::ms;
    return kappa_per_m * units::um;
}

inline double helix_pitch_um(double kappa) { return 2.0 * units::pi / kappa; }

/// hbar^2 kappa^2 / 4m in h*Hz: kinetic energy per atom of a fully magnetized helix.
inline double helix_kinetic_energy(double kappa_rad_per_um, double mass_kg = units::rb87_mass) {
    units::require(kappa_rad_per_um >= 0, "kappa must be non-negative");
    const double k = kappa_rad_per_um / units::um;
    return units::hbar * units::hbar * k * k / (4.0 * mass_kg) / units::planck;
}

inline DerivedParams derive_params(const PhysicalParams& p) {
    p.validate();
    using namespace units;
    DerivedParams d;
    const double hbar2_over_m = hbar * hbar / p.mass_kg;          // J m^2
    const double to_hz_um3 = 1.0 / planck / (um * um * um);       // J m^3 -> Hz um^3
    const double gmu = p.gF * bohr_magneton;

    d.abar_nm = (2.0 * p.a2_nm + p.a0_nm) / 3.0;
    d.delta_a_nm = (p.a2_nm - p.a0_nm) / 3.0;
    d.a_d_nm = mu0 * gmu * gmu * p.mass_kg / (12.0 * pi * hbar * hbar) / nm;

    d.c0 = 4.0 * pi * hbar2_over_m * d.abar_nm * nm * to_hz_um3;
    d.c2 = 4.0 * pi * hbar2_over_m * d.delta_a_nm * nm * to_hz_um3;
    d.c_dd = mu0 * gmu * gmu / (4.0 * pi) * to_hz_um3;
    const double transverse = std::sqrt(2.0 * pi) * p.sigma_y_um;
    d.c0_2d = d.c0 / transverse;
    d.c2_2d = d.c2 / transverse;

    const double n0_si = p.n0_cm3 * per_cm3;
    d.n0_um3 = n0_si / per_um3;
    d.column_peak_um2 = transverse * d.n0_um3;
    d.xi_s_um = 1.0 / std::sqrt(8.0 * pi * std::abs(d.delta_a_nm) * nm * n0_si) / um;
    d.q_hz = quadratic_zeeman(p.B0_mG, p.q_coeff_hz_per_g2);
    d.e_d_hz = mu0 * gmu * gmu * n0_si / 2.0 / planck;
    d.larmor_hz = gmu * p.B0_mG * milligauss / planck;
    d.hbar_over_m = hbar / p.mass_kg / (um * um) * ms;
    d.zeeman_hz_per_mG = gmu * milligauss / planck;
    return d;
}

} // namespace dipspin
