#pragma once

// Internal unit system: length in um, time in ms, energy in h*Hz
// (i.e. energies are stored as E/h in Hz). Spin densities are in units of
// g_F mu_B per um^2 of column, so |M| <= n holds numerically.

#include <numbers>
#include <stdexcept>
#include <string>

namespace dipspin {

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace units {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double mu0 = 1.25663706212e-6;          // T m / A
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;

inline constexpr double um = 1e-6;  // m
inline constexpr double nm = 1e-9;  // m
inline constexpr double ms = 1e-3;  // s
inline constexpr double per_cm3 = 1e6;  // m^-3
inline constexpr double per_um3 = 1e18; // m^-3
inline constexpr double gauss = 1e-4;   // T
inline constexpr double milligauss = 1e-7;

// Phase accumulated per (Hz * ms) of energy-time.
inline constexpr double rad_per_hz_ms = 2.0 * pi * 1e-3;

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

} // namespace units
} // namespace dipspin
