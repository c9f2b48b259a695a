#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dipole_kernel.hpp"
#include "field.hpp"
#include "params.hpp"
#include "rng.hpp"

namespace dipspin {

enum class Potential { none, harmonic };

inline Potential parse_potential(const std::string& v) {
    if (v == "none") return Potential::none;
    if (v == "harmonic") return Potential::harmonic;
    throw InvalidParameter("unknown potential '" + v + "' (expected none|harmonic)");
}
inline std::string to_string(Potential p) { return p == Potential::none ? "none" : "harmonic"; }

struct EvolutionConfig {
    // 0.05 ms resolves both the contact scale (~2 kHz) and the kinetic
    // energy at the grid Nyquist wavevector (~1 kHz for ~0.9 um cells).
    double dt_ms = 0.05;
    double t_final_ms = 250.0;
    double snapshot_every_ms = 10.0;
    KernelMode kernel_mode = KernelMode::larmor;
    double q_hz = std::numeric_limits<double>::quiet_NaN(); // NaN: use q from B0
    double residual_gradient_mG_per_cm = 0.0;
    Potential potential = Potential::harmonic;
    std::uint64_t rng_seed = 1;

    int steps() const { return int(std::llround(t_final_ms / dt_ms)); }
    int snapshot_stride() const { return int(std::llround(snapshot_every_ms / dt_ms)); }

    void validate() const {
        using units::require;
        require(dt_ms > 0 && dt_ms <= 0.2, "dt must satisfy 0 < dt <= 0.2 ms");
        require(t_final_ms >= 0 && std::isfinite(t_final_ms), "t_final must be non-negative");
        require(snapshot_every_ms > 0, "snapshot_every must be positive");
        const double ratio = snapshot_every_ms / dt_ms;
        require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio,
                "snapshot_every must be a multiple of dt");
        require(std::abs(t_final_ms / dt_ms - steps()) < 1e-9 * std::max(1.0, t_final_ms / dt_ms),
                "t_final must be a multiple of dt");
        require(std::isnan(q_hz) || std::isfinite(q_hz), "q must be finite");
        require(std::isfinite(residual_gradient_mG_per_cm), "residual gradient must be finite");
    }
};

struct Pulse {
    double time_ms;
    Vec3 axis;
    double angle;
};

struct PulseSchedule {
    std::vector<Pulse> events;

    void validate(double t_final_ms) const {
        double last = -std::numeric_limits<double>::infinity();
        for (const auto& e : events) {
            units::require(e.time_ms > last, "pulse times must be strictly increasing");
            units::require(e.time_ms >= 0 && e.time_ms <= t_final_ms, "pulse time outside [0, t_final]");
            units::require(std::abs(e.axis[2]) < 1e-12, "pulse axes must lie in the x-y plane");
            spin1::require_unit_axis(e.axis);
            last = e.time_ms;
        }
    }
};

/// Poisson train of pi/2 pulses about uniformly random in-plane axes.
inline PulseSchedule make_cancellation_schedule(double rate_khz, double t_final_ms, std::uint64_t seed) {
    units::require(rate_khz > 0, "pulse rate must be positive");
    auto rng = make_stream(seed, Stream::schedule);
    std::exponential_distribution<double> wait(rate_khz); // per ms
    std::uniform_real_distribution<double> phi(0.0, 2.0 * units::pi);
    PulseSchedule s;
    double t = 0;
    while (true) {
        t += wait(rng);
        if (t > t_final_ms) break;
        const double a = phi(rng);
        if (!s.events.empty() && t <= s.events.back().time_ms) continue;
        s.events.push_back({t, {std::cos(a), std::sin(a), 0.0}, units::pi / 2});
    }
    return s;
}

/// Everything the integrator needs, in internal units.
struct Model {
    Grid2D grid;
    double c0 = 0;           // Hz um^2
    double c2 = 0;           // Hz um^2
    double q_hz = 0;
    double gradient_hz_per_um = 0; // linear Zeeman slope along z
    double hbar_over_m = 0;  // um^2/ms
    RVec potential;          // Hz per site; empty for none

    static Model from(const PhysicalParams& p, const Grid2D& g, const EvolutionConfig& cfg) {
        const DerivedParams d = derive_params(p);
        Model m;
        m.grid = g;
        m.c0 = d.c0_2d;
        m.c2 = d.c2_2d;
        m.q_hz = std::isnan(cfg.q_hz) ? d.q_hz : cfg.q_hz;
        m.gradient_hz_per_um = d.zeeman_hz_per_mG * cfg.residual_gradient_mG_per_cm * 1e-4;
        m.hbar_over_m = d.hbar_over_m;
        if (cfg.potential == Potential::harmonic) {
            const auto [ax, az] = trap_coefficients(p);
            m.potential.resize(g.size());
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.nz; ++j)
                    m.potential[g.index(i, j)] = ax * g.x(i) * g.x(i) + az * g.z(j) * g.z(j);
        }
        return m;
    }

    /// Kinetic energy (Hz) of a plane wave with wavenumber k.
    double kinetic_hz(double k2) const { return hbar_over_m * k2 / (4.0 * units::pi) * 1e3; }
};

/// Per-atom energy terms in h*Hz.
struct EnergyTerms {
    double kinetic = 0, potential = 0, contact0 = 0, contact2 = 0, zeeman = 0, dipolar = 0;
    double total() const { return kinetic + potential + contact0 + contact2 + zeeman + dipolar; }
};

/// Symmetric split-step integrator.
///
/// One step is P(dt/2; fields at t+dt) K(dt) P(dt/2; fields at t), where P is
/// the on-site propagator with the mean fields frozen and K the exact kinetic
/// step. The fields for the closing half step are obtained with one
/// predictor pass; the composition is time symmetric and second order.
class SplitStepper {
public:
    SplitStepper(Model model, const DipoleKernel& kernel, double dt_ms)
        : model_(std::move(model)), solver_(kernel), fft_(model_.grid.nx, model_.grid.nz), dt_(dt_ms) {
        require_same_grid(model_.grid, kernel.grid());
        const auto& g = model_.grid;
        kinetic_phase_.resize(g.size());
        const double inv_n = 1.0 / double(g.size());
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nz; ++j) {
                const double k2 = g.kx(i) * g.kx(i) + g.kz(j) * g.kz(j);
                const double phase = model_.kinetic_hz(k2) * units::rad_per_hz_ms * dt_;
                kinetic_phase_[g.index(i, j)] = std::polar(inv_n, -phase);
            }
        for (auto& c : m_) c.resize(g.size());
        z_.resize(g.size());
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nz; ++j) z_[g.index(i, j)] = g.z(j);
    }

    const Model& model() const { return model_; }
    double dt() const { return dt_; }
    bool dipoles_on() const { return solver_.kernel().mode() != KernelMode::off; }

    /// Must be called whenever the state is modified outside step().
    void invalidate() { fields_valid_ = false; }

    void step(SpinorField& s) {
        const double half = 0.5 * dt_;
        if (!fields_valid_) update_dipolar(s);
        position(s, s, half);
        kinetic(s);
        mid_ = s;
        update_dipolar(mid_);
        position(mid_, mid_, half); // predictor: fields from the kinetic output
        update_dipolar(mid_);
        position(s, mid_, half);    // corrector: fields at the predicted end point
        fields_valid_ = true;
        ++count_;
        if (!std::isfinite(last_norm_))
            throw NumericalFailure("non-finite state at step " + std::to_string(count_));
    }

    /// Current dipolar field (valid after a step or after refresh()).
    const std::array<RVec, 3>& dipolar_field() const { return b_; }
    void refresh(const SpinorField& s) { update_dipolar(s); fields_valid_ = true; }

    EnergyTerms energy(const SpinorField& s) {
        const auto& g = model_.grid;
        EnergyTerms e;
        double atoms = 0;
        // kinetic via spectral derivative
        CVec work(g.size());
        for (const auto& comp : s.psi) {
            std::copy(comp.begin(), comp.end(), work.begin());
            fft_.forward(work.data());
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.nz; ++j) {
                    const double k2 = g.kx(i) * g.kx(i) + g.kz(j) * g.kz(j);
                    e.kinetic += model_.kinetic_hz(k2) * std::norm(work[g.index(i, j)]);
                }
        }
        e.kinetic /= double(g.size());
        if (dipoles_on()) update_dipolar(s);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double n = s.density(k);
            const Vec3 f = spin1::spin_density(s.psi[0][k], s.psi[1][k], s.psi[2][k]);
            atoms += n;
            if (!model_.potential.empty()) e.potential += model_.potential[k] * n;
            e.contact0 += 0.5 * model_.c0 * n * n;
            e.contact2 += 0.5 * model_.c2 * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
            e.zeeman += model_.q_hz * (std::norm(s.psi[0][k]) + std::norm(s.psi[2][k])) +
                        model_.gradient_hz_per_um * z_[k] * f[2];
            if (dipoles_on()) e.dipolar -= 0.5 * (b_[0][k] * f[0] + b_[1][k] * f[1] + b_[2][k] * f[2]);
        }
        fields_valid_ = false;
        const double inv = 1.0 / atoms; // cell areas cancel
        e.kinetic *= inv;
        e.potential *= inv;
        e.contact0 *= inv;
        e.contact2 *= inv;
        e.zeeman *= inv;
        e.dipolar *= inv;
        return e;
    }

private:
    void update_dipolar(const SpinorField& s) {
        if (!dipoles_on()) {
            if (b_[0].size() != model_.grid.size())
                for (auto& c : b_) c.assign(model_.grid.size(), 0.0);
            return;
        }
        for (std::size_t k = 0; k < model_.grid.size(); ++k) {
            const Vec3 f = spin1::spin_density(s.psi[0][k], s.psi[1][k], s.psi[2][k]);
            m_[0][k] = f[0];
            m_[1][k] = f[1];
            m_[2][k] = f[2];
        }
        solver_.field({m_[0].data(), m_[1].data(), m_[2].data()}, b_);
    }

    // target <- P(tau) target, with local fields taken from ref and the
    // dipolar field from b_. target and ref have equal densities.
    void position(SpinorField& target, const SpinorField& ref, double tau) {
        const double phase = units::rad_per_hz_ms * tau;
        const bool has_v = !model_.potential.empty();
        double norm = 0;
        for (std::size_t k = 0; k < model_.grid.size(); ++k) {
            const Spinor r = ref.at(k);
            const double n = std::norm(r[0]) + std::norm(r[1]) + std::norm(r[2]);
            const Vec3 f = spin1::spin_density(r[0], r[1], r[2]);
            const Vec3 h{model_.c2 * f[0] - b_[0][k], model_.c2 * f[1] - b_[1][k],
                         model_.c2 * f[2] - b_[2][k] + model_.gradient_hz_per_um * z_[k]};
            const double scalar = (has_v ? model_.potential[k] : 0.0) + model_.c0 * n;
            Spinor v = target.at(k);
            spin1::propagate(v, h, model_.q_hz, phase);
            const cplx w = std::polar(1.0, -phase * scalar);
            v = {w * v[0], w * v[1], w * v[2]};
            target.set(k, v);
            norm += n;
        }
        last_norm_ = norm;
    }

    void kinetic(SpinorField& s) {
        for (auto& comp : s.psi) {
            fft_.forward(comp.data());
            for (std::size_t k = 0; k < comp.size(); ++k) comp[k] *= kinetic_phase_[k];
            fft_.backward(comp.data());
        }
    }

    Model model_;
    DipolarSolver solver_;
    Fft2D fft_;
    double dt_;
    CVec kinetic_phase_;
    RVec z_;
    std::array<RVec, 3> m_;
    std::array<RVec, 3> b_;
    SpinorField mid_;
    bool fields_valid_ = false;
    double last_norm_ = 0;
    long count_ = 0;
};

using Observer = std::function<void(double t_ms, const SpinorField&)>;

/// Advances s to t_final, applying scheduled pulses between steps and
/// calling the observer at t = 0, every snapshot_every, and at t_final.
inline SpinorField evolve(SpinorField s, const Model& model, const DipoleKernel& kernel,
                          const EvolutionConfig& cfg, const PulseSchedule& schedule,
                          const Observer& observer) {
    cfg.validate();
    schedule.validate(cfg.t_final_ms);
    SplitStepper stepper(model, kernel, cfg.dt_ms);
    const int steps = cfg.steps();
    const int stride = cfg.snapshot_stride();
    std::size_t next_pulse = 0;
    auto apply_pulses = [&](double t) {
        bool any = false;
        while (next_pulse < schedule.events.size() && schedule.events[next_pulse].time_ms <= t + 1e-9) {
            const auto& e = schedule.events[next_pulse++];
            rotate_spin_inplace(s, e.axis, e.angle);
            any = true;
        }
        if (any) stepper.invalidate();
    };
    apply_pulses(0.0);
    if (observer) observer(0.0, s);
    for (int n = 1; n <= steps; ++n) {
        stepper.step(s);
        const double t = n * cfg.dt_ms;
        apply_pulses(t);
        if (observer && (n % stride == 0 || n == steps)) observer(t, s);
    }
    return s;
}

inline EnergyTerms energy_decomposition(const SpinorField& s, const Model& model, const DipoleKernel& kernel) {
    SplitStepper stepper(model, kernel, 0.05);
    return stepper.energy(s);
}

} // namespace dipspin
