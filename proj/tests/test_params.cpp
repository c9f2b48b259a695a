#include <gtest/gtest.h>

#include <cstring>
#include <numbers>

#include <dipspin/params.hpp>

using namespace dipspin;

namespace {

// Independent SI evaluation, written out long-hand.
constexpr double hbar = 1.054571817e-34, h = 6.62607015e-34, muB = 9.2740100783e-24, mu0 = 1.25663706212e-6;
constexpr double mass = 86.909180527 * 1.66053906660e-27;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Params, ScatteringLengthCombinations) {
    const auto d = derive_params(PhysicalParams::reference());
    EXPECT_NEAR(d.delta_a_nm, -0.0267, 1e-4);
    EXPECT_NEAR(d.abar_nm, 5.337, 1e-3);
    EXPECT_LT(d.delta_a_nm, 0.0);
    EXPECT_LT(d.c2, 0.0);
    EXPECT_GT(d.a_d_nm, 0.0);
}

TEST(Params, DipolarLengthRatioNearQuotedValue) {
    const auto d = derive_params(PhysicalParams::reference());
    const double ratio = d.a_d_nm / std::abs(d.delta_a_nm);
    EXPECT_GT(ratio, 0.35 * 0.99);
    EXPECT_LT(ratio, 0.40);
    EXPECT_LT(std::abs(ratio - 0.4), 0.2 * 0.4);
}

TEST(Params, DipoleEnergyScale) {
    const auto d = derive_params(PhysicalParams::reference());
    const double closed = mu0 * 0.25 * muB * muB * 2.3e20 / 2 / h;
    EXPECT_NEAR(d.e_d_hz, closed, 1e-10 * closed);
    EXPECT_NEAR(d.e_d_hz, 4.7, 0.1 * 4.7);
}

TEST(Params, SpinHealingLengthFromClosedForm) {
    const auto d = derive_params(PhysicalParams::reference());
    const double xi = 1.0 / std::sqrt(8 * std::numbers::pi * (0.08 / 3) * 1e-9 * 2.3e20) * 1e6;
    EXPECT_NEAR(d.xi_s_um, xi, 1e-10 * xi);
}

TEST(Params, QuadraticZeeman) {
    EXPECT_NEAR(quadratic_zeeman(165.0) / 2, 1.0, 0.05);
    EXPECT_EQ(quadratic_zeeman(0.0), 0.0);
    EXPECT_NEAR(quadratic_zeeman(330.0), 4.0 * quadratic_zeeman(165.0), 1e-12);
    EXPECT_THROW(quadratic_zeeman(-1.0), InvalidParameter);
}

TEST(Params, HelixWavevector) {
    EXPECT_EQ(helix_wavevector(0.0, 5.0), 0.0);
    EXPECT_THROW(helix_wavevector(1.0, 0.0), InvalidParameter);
    // 60 um pitch after 5 ms takes ~47.6 mG/cm
    const double kappa = helix_wavevector(47.6, 5.0);
    EXPECT_NEAR(helix_pitch_um(kappa), 60.0, 0.2);
    // linear in gradient and duration
    EXPECT_NEAR(helix_wavevector(95.2, 5.0), 2 * kappa, 1e-12);
    EXPECT_NEAR(helix_wavevector(47.6, 10.0), 2 * kappa, 1e-12);
    // gradients of ~19-57 mG/cm for 5 ms span 50-150 um
    EXPECT_NEAR(helix_pitch_um(helix_wavevector(57.1, 5.0)), 50.0, 0.1);
    EXPECT_NEAR(helix_pitch_um(helix_wavevector(19.04, 5.0)), 150.0, 0.2);
}

TEST(Params, HelixKineticEnergy) {
    const double e50 = helix_kinetic_energy(2 * std::numbers::pi / 50.0);
    EXPECT_NEAR(e50, 0.46, 0.01);
    EXPECT_LT(e50 / 2, 0.5);
    EXPECT_EQ(helix_kinetic_energy(0.0), 0.0);
    EXPECT_NEAR(helix_kinetic_energy(2 * std::numbers::pi / 10.0) / 2, 5.7, 0.1 * 5.7);
}

TEST(Params, InvalidInputsRejected) {
    auto p = PhysicalParams::reference();
    p.n0_cm3 = 0;
    EXPECT_THROW(derive_params(p), InvalidParameter);
    p = PhysicalParams::reference();
    p.a2_nm = -1;
    EXPECT_THROW(derive_params(p), InvalidParameter);
    p = PhysicalParams::reference();
    p.sigma_y_um = 0;
    EXPECT_THROW(derive_params(p), InvalidParameter);
}

TEST(Params, DeterministicBitIdentical) {
    const auto a = derive_params(PhysicalParams::reference());
    const auto b = derive_params(PhysicalParams::reference());
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(Params, UnitAuditAgainstSI) {
    const auto p = PhysicalParams::reference();
    const auto d = derive_params(p);
    const double n0 = 2.3e20; // m^-3
    const double abar = (2 * 5.31e-9 + 5.39e-9) / 3, da = (5.31e-9 - 5.39e-9) / 3;
    const double gmu = 0.5 * muB;
    // energies in J, volumes in m^3 -> Hz um^3 = J/h * 1e18
    EXPECT_LT(rel(d.c0, 4 * std::numbers::pi * hbar * hbar * abar / mass / h * 1e18), 1e-10);
    EXPECT_LT(rel(d.c2, 4 * std::numbers::pi * hbar * hbar * da / mass / h * 1e18), 1e-10);
    EXPECT_LT(rel(d.c_dd, mu0 * gmu * gmu / (4 * std::numbers::pi) / h * 1e18), 1e-10);
    EXPECT_LT(rel(d.a_d_nm, mu0 * gmu * gmu * mass / (12 * std::numbers::pi * hbar * hbar) * 1e9), 1e-10);
    EXPECT_LT(rel(d.e_d_hz, mu0 * gmu * gmu * n0 / 2 / h), 1e-10);
    EXPECT_LT(rel(d.q_hz, 71.6 * 0.165 * 0.165), 1e-10);
    EXPECT_LT(rel(d.hbar_over_m, hbar / mass * 1e12 * 1e-3), 1e-10);
    EXPECT_LT(rel(d.larmor_hz, gmu * 165e-7 / h), 1e-10);
    EXPECT_LT(rel(d.n0_um3, 230.0), 1e-10);
    EXPECT_NEAR(d.larmor_hz, 115e3, 1e3);
    const double sigma = 1.8e-6 / std::sqrt(5.0);
    EXPECT_LT(rel(d.c0_2d, 4 * std::numbers::pi * hbar * hbar * abar / mass / (std::sqrt(2 * std::numbers::pi) * sigma) / h * 1e12), 1e-10);
    // E_d = 2 pi c_dd n0 in internal units
    EXPECT_LT(rel(d.e_d_hz, 2 * std::numbers::pi * d.c_dd * d.n0_um3), 1e-12);
}
