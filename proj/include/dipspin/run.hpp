#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "snapshot.hpp"

namespace dipspin {

namespace fs = std::filesystem;

/// m_F = -1 gas -> pi/2 pulse (spins along +x) -> helix imprint -> seeded noise.
inline SpinorField prepare_run_state(const RunConfig& c) {
    PrepareOptions opt;
    opt.box_fraction = c.box_fraction;
    SpinorField s = prepare_initial(c.phys, c.grid, c.profile, opt);
    rotate_spin_inplace(s, {0.0, -1.0, 0.0}, units::pi / 2);
    if (c.kappa() > 0) s = imprint_helix(std::move(s), c.kappa());
    auto rng = make_stream(c.evo.rng_seed, Stream::noise);
    add_spin_noise(s, c.noise_amplitude, rng);
    return s;
}

inline PulseSchedule run_schedule(const RunConfig& c) {
    if (c.cancel_rate_khz <= 0) return {};
    return make_cancellation_schedule(c.cancel_rate_khz, c.evo.t_final_ms, c.evo.rng_seed);
}

/// Turns states into OrderSample rows: spectrum, regions, vortices, energies.
class SampleAnalyzer {
public:
    explicit SampleAnalyzer(const RunConfig& c)
        : cfg_(c), model_(Model::from(c.phys, c.grid, c.evo)),
          kernel_(build_kernel(c.grid, c.phys.sigma_y_um, c.evo.kernel_mode, derive_params(c.phys).c_dd)),
          energy_(model_, kernel_, c.evo.dt_ms) {}

    const Model& model() const { return model_; }
    const DipoleKernel& kernel() const { return kernel_; }

    OrderSample operator()(double t_ms, const SpinorField& s) {
        const auto m = magnetization(s);
        const auto ps = power_spectrum(m);
        const double bg = cfg_.noise_amplitude > 0 ? estimate_background(ps, cfg_.regions) : 0.0;
        OrderSample out;
        out.t_ms = t_ms;
        out.order = order_parameters(ps, cfg_.regions, bg);
        const auto v = detect_vortices(m, cfg_.vortex_threshold);
        out.vortex_count = v.count();
        out.net_charge = v.net_charge();
        out.energy = energy_.energy(s);
        return out;
    }

private:
    RunConfig cfg_;
    Model model_;
    DipoleKernel kernel_;
    SplitStepper energy_;
};

inline const char* timeseries_header =
    "t_ms,long_order,short_order,total_power,n_vortices,e_kin,e_pot,e_c0,e_c2,e_zeeman,e_dipole\n";

inline std::string timeseries_row(const OrderSample& s) {
    char buf[512];
    const auto& e = s.energy;
    std::snprintf(buf, sizeof buf, "%.10g,%.10e,%.10e,%.10e,%d,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e\n", s.t_ms,
                  s.order.long_order, s.order.short_order, s.order.total, s.vortex_count, e.kinetic, e.potential,
                  e.contact0, e.contact2, e.zeeman, e.dipolar);
    return buf;
}

inline std::string snapshot_name(double t_ms) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_t%.6g.txt", t_ms);
    return buf;
}

inline std::string meta_text(const RunConfig& c) {
    const auto d = derive_params(c.phys);
    std::ostringstream o;
    o.precision(10);
    o << "# dipspin run\n# config_hash = " << config_hash(c) << "\n"
      << "# derived: c0_2d_hz_um2 = " << d.c0_2d << ", c2_2d_hz_um2 = " << d.c2_2d << ", c_dd_hz_um3 = " << d.c_dd
      << ", q_hz = " << d.q_hz << ", e_d_hz = " << d.e_d_hz << ", xi_s_um = " << d.xi_s_um << "\n"
      << serialize(c);
    return o.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidParameter("cannot write '" + p.string() + "'");
    f << text;
}

/// Runs one trajectory. With a non-empty out_dir the run directory gets
/// `meta`, `timeseries.csv`, snapshots, and finally `DONE`; while running
/// (or after a failure) it holds an `INCOMPLETE` marker instead.
inline OrderParamSeries run_simulate(const RunConfig& cfg, const fs::path& out_dir = {},
                                     const Observer& extra = {}) {
    cfg.validate();
    const bool files = !out_dir.empty();
    std::ofstream csv;
    const std::string hash = config_hash(cfg);
    if (files) {
        fs::create_directories(out_dir);
        fs::remove(out_dir / "DONE");
        write_text(out_dir / "INCOMPLETE", "run in progress\n");
        write_text(out_dir / "meta", meta_text(cfg));
        csv.open(out_dir / "timeseries.csv", std::ios::binary);
        if (!csv) throw InvalidParameter("cannot write timeseries.csv in '" + out_dir.string() + "'");
        csv << timeseries_header;
    }
    OrderParamSeries series;
    try {
        SampleAnalyzer analyze(cfg);
        SpinorField s = prepare_run_state(cfg);
        evolve(std::move(s), analyze.model(), analyze.kernel(), cfg.evo, run_schedule(cfg),
               [&](double t, const SpinorField& state) {
                   series.push_back(analyze(t, state));
                   if (files) {
                       csv << timeseries_row(series.back()) << std::flush;
                       if (cfg.write_snapshots) write_snapshot((out_dir / snapshot_name(t)).string(), {t, hash, state});
                   }
                   if (extra) extra(t, state);
               });
    } catch (const std::exception& e) {
        if (files) write_text(out_dir / "INCOMPLETE", std::string("run failed: ") + e.what() + "\n");
        throw;
    }
    if (files) {
        csv.close();
        fs::remove(out_dir / "INCOMPLETE");
        write_text(out_dir / "DONE", hash + "\n");
    }
    return series;
}

struct SweepPoint {
    double pitch_um;
    double kappa;
    double gamma_per_s;
};

/// One run per pitch (sequential; each with the configured seed), growth
/// rate per run, and `gamma.csv` when out_dir is set.
inline std::vector<SweepPoint> run_sweep_kappa(const RunConfig& base, const std::vector<double>& pitches,
                                               const fs::path& out_dir = {}) {
    units::require(pitches.size() >= 2, "sweep needs at least two pitches");
    for (double p : pitches) units::require(p > 0, "pitches must be positive");
    std::vector<SweepPoint> out;
    for (double p : pitches) {
        RunConfig c = base;
        c.pitch_um = p;
        fs::path dir;
        if (!out_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof name, "pitch_%gum", p);
            dir = out_dir / name;
        }
        const auto series = run_simulate(c, dir);
        out.push_back({p, c.kappa(), growth_rate(series)});
    }
    if (!out_dir.empty()) {
        std::string text = "kappa_rad_per_um,gamma_per_s\n";
        char row[96];
        for (const auto& s : out) {
            std::snprintf(row, sizeof row, "%.10e,%.10e\n", s.kappa, s.gamma_per_s);
            text += row;
        }
        write_text(out_dir / "gamma.csv", text);
    }
    return out;
}

inline std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw InvalidParameter("cannot read '" + p.string() + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Re-analyzes the stored snapshots of a run directory; writes
/// `analysis.csv` (same columns as timeseries.csv) and returns the series.
inline OrderParamSeries analyze_run(const fs::path& dir) {
    const RunConfig cfg = parse_config(read_text(dir / "meta"));
    const std::string hash = config_hash(cfg);
    std::vector<Snapshot> snaps;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("snap_t", 0) == 0 && e.path().extension() == ".txt") snaps.push_back(read_snapshot(e.path().string()));
    }
    units::require(!snaps.empty(), "no snapshots in '" + dir.string() + "'");
    std::sort(snaps.begin(), snaps.end(), [](const auto& a, const auto& b) { return a.time_ms < b.time_ms; });
    SampleAnalyzer analyze(cfg);
    OrderParamSeries series;
    std::string text = timeseries_header;
    for (const auto& s : snaps) {
        if (s.config_hash != hash) throw InvalidParameter("snapshot hash " + s.config_hash + " does not match meta " + hash);
        require_same_grid(s.state.grid, cfg.grid);
        series.push_back(analyze(s.time_ms, s.state));
        text += timeseries_row(series.back());
    }
    write_text(dir / "analysis.csv", text);
    return series;
}

} // namespace dipspin
