// dipspin: command-line front end.
//
//   dipspin constants   [--config F] [--preset defaults-paper]
//   dipspin simulate    [--config F] [--preset P] [--seed N] [--out DIR] [--dipoles M] [--cancel-pulses R]
//   dipspin analyze     RUN_DIR
//   dipspin sweep-kappa [--config F] [--preset P] --pitches 50,60,100,150 [--out DIR] ...
//   dipspin selfcheck   [--tamper-kernel-sign]
//
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure or
// failed self-check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include <dipspin/run.hpp>
#include <dipspin/selfcheck.hpp>

namespace {

using namespace dipspin;

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string dipoles;
    std::optional<double> cancel_khz;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_run_flags) {
    cmd->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset_name, "parameter preset (defaults-paper)");
    if (!with_run_flags) return;
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--dipoles", o.dipoles, "dipolar kernel: bare|larmor|off");
    cmd->add_option("--cancel-pulses", o.cancel_khz, "mean rate (kHz) of the pi/2 cancellation pulse train");
}

RunConfig load(const CommonOptions& o) {
    std::string text;
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    std::string preset_name = o.preset_name;
    if (o.config_path.empty() && preset_name.empty()) preset_name = "defaults-paper";
    RunConfig c = parse_config(text, preset_name);
    if (o.seed) c.evo.rng_seed = *o.seed;
    if (!o.dipoles.empty()) c.evo.kernel_mode = parse_kernel_mode(o.dipoles);
    if (o.cancel_khz) {
        units::require(*o.cancel_khz >= 0, "--cancel-pulses must be non-negative");
        c.cancel_rate_khz = *o.cancel_khz;
    }
    c.validate();
    return c;
}

int cmd_constants(const RunConfig& c) {
    const auto& p = c.phys;
    const auto d = derive_params(p);
    const auto tf = thomas_fermi_2d(p);
    auto row = [](const char* name, double v, const char* unit) { std::printf("%-22s %-16.8g %s\n", name, v, unit); };
    row("abar", d.abar_nm, "nm");
    row("delta_a", d.delta_a_nm, "nm");
    row("a_d", d.a_d_nm, "nm");
    row("a_d/|delta_a|", d.a_d_nm / std::abs(d.delta_a_nm), "");
    row("c0", d.c0, "h Hz um^3");
    row("c2", d.c2, "h Hz um^3");
    row("c_dd", d.c_dd, "h Hz um^3");
    row("c0_2d", d.c0_2d, "h Hz um^2");
    row("c2_2d", d.c2_2d, "h Hz um^2");
    row("xi_s", d.xi_s_um, "um");
    row("q", d.q_hz, "h Hz");
    row("q/2", d.q_hz / 2, "h Hz");
    row("E_d", d.e_d_hz, "h Hz");
    row("larmor", d.larmor_hz, "Hz");
    row("n0", d.n0_um3, "um^-3");
    row("column_peak", d.column_peak_um2, "um^-2");
    row("hbar/m", d.hbar_over_m, "um^2/ms");
    row("gF muB/h", d.zeeman_hz_per_mG, "Hz/mG");
    row("tf_mu", tf.mu_hz, "h Hz");
    row("tf_rx", tf.rx_um, "um");
    row("tf_rz", tf.rz_um, "um");
    if (c.pitch_um > 0) {
        row("pitch", c.pitch_um, "um");
        row("E_kappa", helix_kinetic_energy(c.kappa(), p.mass_kg), "h Hz");
    }
    row("hbar^2 k^2/8m @10um", helix_kinetic_energy(2 * units::pi / 10.0, p.mass_kg) / 2, "h Hz");
    return 0;
}

void print_series(const OrderParamSeries& s) {
    std::fputs(timeseries_header, stdout);
    for (const auto& r : s) std::fputs(timeseries_row(r).c_str(), stdout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-2D spin-1 condensate dynamics with dipolar interactions"};
    app.require_subcommand(1);

    CommonOptions copt, sopt, wopt;
    auto* constants = app.add_subcommand("constants", "print the derived parameter table");
    add_common(constants, copt, false);

    auto* simulate = app.add_subcommand("simulate", "run one trajectory into a run directory");
    add_common(simulate, sopt, true);

    std::string analyze_dir;
    auto* analyze = app.add_subcommand("analyze", "re-analyze the snapshots of a run directory");
    analyze->add_option("run_dir", analyze_dir, "run directory")->required()->check(CLI::ExistingDirectory);

    std::vector<double> pitches;
    auto* sweep = app.add_subcommand("sweep-kappa", "growth rate versus helix wavevector");
    add_common(sweep, wopt, true);
    sweep->add_option("--pitches", pitches, "helix pitches in um")->delimiter(',')->required();

    bool tamper = false;
    auto* selfcheck = app.add_subcommand("selfcheck", "compare production paths against independent oracles");
    selfcheck->add_flag("--tamper-kernel-sign", tamper, "negative control: flip the kernel sign");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*constants) return cmd_constants(load(copt));

        if (*simulate) {
            const RunConfig c = load(sopt);
            const std::string out = sopt.out_dir.empty() ? "run" : sopt.out_dir;
            const auto series = run_simulate(c, out);
            std::fprintf(stderr, "wrote %s (config %s)\n", out.c_str(), config_hash(c).c_str());
            print_series(series);
            return 0;
        }

        if (*analyze) {
            print_series(analyze_run(analyze_dir));
            return 0;
        }

        if (*sweep) {
            if (pitches.empty()) throw InvalidParameter("--pitches needs at least two values");
            const RunConfig c = load(wopt);
            const std::string out = wopt.out_dir.empty() ? "sweep" : wopt.out_dir;
            const auto pts = run_sweep_kappa(c, pitches, out);
            std::printf("pitch_um,kappa_rad_per_um,gamma_per_s\n");
            for (const auto& p : pts) std::printf("%g,%.10e,%.10e\n", p.pitch_um, p.kappa, p.gamma_per_s);
            return 0;
        }

        if (*selfcheck) {
            SelfcheckOptions opt;
            opt.tamper_kernel_sign = tamper;
            const auto r = run_selfcheck(PhysicalParams::reference(), opt);
            for (const auto& c : r.checks)
                std::printf("%-4s %-55s err=%.3e tol=%.1e\n", c.pass() ? "ok" : "FAIL", c.name.c_str(), c.error,
                            c.tolerance);
            const bool budget = r.seconds < 300.0;
            std::printf("%-4s %-55s %.1f s (budget 300 s)\n", budget ? "ok" : "FAIL", "runtime", r.seconds);
            return r.pass() && budget ? 0 : 2;
        }
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const InvalidParameter& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
