#pragma once

// Run configuration as flat `key = value` text. Every key is described once
// in a table (parser, printer, range check), so parsing, validation and
// serialization cannot drift apart.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "dynamics.hpp"
#include "field.hpp"

namespace dipspin {

struct RunConfig {
    PhysicalParams phys;
    Grid2D grid{64, 512, 48.0, 460.0};
    EvolutionConfig evo;
    RegionSpec regions;
    Profile profile = Profile::thomas_fermi;
    double box_fraction = 0.8;
    double pitch_um = 60.0;        // 0 disables the helix imprint
    double noise_amplitude = 1e-3; // relative white spin noise at t = 0
    double cancel_rate_khz = 0.0;  // 0 disables the pulse train
    double vortex_threshold = 0.15;
    bool write_snapshots = true;

    double kappa() const { return pitch_um > 0 ? 2.0 * units::pi / pitch_um : 0.0; }

    /// Cross-module checks beyond the per-key ranges.
    void validate() const {
        phys.validate();
        grid.validate();
        evo.validate();
        regions.validate(grid);
        if (profile == Profile::thomas_fermi) {
            const auto tf = thomas_fermi_2d(phys);
            units::require(tf.rx_um < grid.lx / 2 && tf.rz_um < grid.lz / 2,
                           "grid too small for the Thomas-Fermi radii");
        }
    }
};

class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v) {
    double out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out)) throw InvalidParameter("not a number: '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& v) {
    long long out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) throw InvalidParameter("not an integer: '" + v + "'");
    return out;
}

// shortest text that reads back to the same double
inline std::string fmt(double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    bool required_without_preset;
};

// Builds a numeric key with an inclusive/exclusive range check.
template <class Ref>
Key real_key(std::string name, Ref ref, double lo, double hi, bool lo_open, bool required) {
    auto set = [=](RunConfig& c, const std::string& v) {
        const double x = parse_double(v);
        if ((lo_open ? x <= lo : x < lo) || x > hi)
            throw InvalidParameter("value " + v + " out of range " + (lo_open ? "(" : "[") + fmt(lo) + ", " +
                                   fmt(hi) + "]");
        ref(c) = x;
    };
    auto get = [=](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); };
    return {std::move(name), set, get, required};
}

inline const std::vector<Key>& keys() {
    constexpr double inf = std::numeric_limits<double>::max();
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        auto twopi = 2.0 * units::pi;
        // physics
        k.push_back(real_key("a0_nm", [](RunConfig& c) -> double& { return c.phys.a0_nm; }, 0, inf, true, true));
        k.push_back(real_key("a2_nm", [](RunConfig& c) -> double& { return c.phys.a2_nm; }, 0, inf, true, true));
        k.push_back(real_key("n0_cm3", [](RunConfig& c) -> double& { return c.phys.n0_cm3; }, 0, inf, true, true));
        k.push_back(real_key("atom_number", [](RunConfig& c) -> double& { return c.phys.atom_number; }, 0, inf, true, true));
        k.push_back(real_key("B0_mG", [](RunConfig& c) -> double& { return c.phys.B0_mG; }, 0, inf, false, true));
        k.push_back(real_key("sigma_y_um", [](RunConfig& c) -> double& { return c.phys.sigma_y_um; }, 0, inf, true, false));
        k.push_back(real_key("q_coeff_hz_per_g2", [](RunConfig& c) -> double& { return c.phys.q_coeff_hz_per_g2; }, 0, inf, false, false));
        // trap given as ordinary frequencies (Hz); stored as angular
        const char* axes[3] = {"trap_x_hz", "trap_y_hz", "trap_z_hz"};
        for (int a = 0; a < 3; ++a) {
            Key key;
            key.name = axes[a];
            key.required_without_preset = true;
            key.set = [a, twopi](RunConfig& c, const std::string& v) {
                const double f = parse_double(v);
                if (f < 0) throw InvalidParameter("value " + v + " out of range [0, inf)");
                c.phys.trap_angular[a] = twopi * f;
            };
            key.get = [a, twopi](const RunConfig& c) { return fmt(c.phys.trap_angular[a] / twopi); };
            k.push_back(key);
        }
        // grid
        for (auto [name, member] : {std::pair{"nx", &Grid2D::nx}, std::pair{"nz", &Grid2D::nz}}) {
            Key key;
            key.name = name;
            key.required_without_preset = true;
            key.set = [member](RunConfig& c, const std::string& v) {
                const auto n = parse_int(v);
                if (n < 8 || n > (1 << 14) || !std::has_single_bit(unsigned(n)))
                    throw InvalidParameter("value " + v + " must be a power of two in [8, 16384]");
                c.grid.*member = int(n);
            };
            key.get = [member](const RunConfig& c) { return std::to_string(c.grid.*member); };
            k.push_back(key);
        }
        k.push_back(real_key("lx_um", [](RunConfig& c) -> double& { return c.grid.lx; }, 0, inf, true, true));
        k.push_back(real_key("lz_um", [](RunConfig& c) -> double& { return c.grid.lz; }, 0, inf, true, true));
        // evolution
        k.push_back(real_key("dt", [](RunConfig& c) -> double& { return c.evo.dt_ms; }, 0, 0.2, true, false));
        k.push_back(real_key("t_final", [](RunConfig& c) -> double& { return c.evo.t_final_ms; }, 0, 1e6, false, false));
        k.push_back(real_key("snapshot_every", [](RunConfig& c) -> double& { return c.evo.snapshot_every_ms; }, 0, 1e6, true, false));
        {
            Key key{"dipoles",
                    [](RunConfig& c, const std::string& v) { c.evo.kernel_mode = parse_kernel_mode(v); },
                    [](const RunConfig& c) { return to_string(c.evo.kernel_mode); }, false};
            k.push_back(key);
        }
        {
            Key key{"q_hz",
                    [](RunConfig& c, const std::string& v) {
                        c.evo.q_hz = v == "auto" ? std::numeric_limits<double>::quiet_NaN() : parse_double(v);
                    },
                    [](const RunConfig& c) { return std::isnan(c.evo.q_hz) ? std::string("auto") : fmt(c.evo.q_hz); },
                    false};
            k.push_back(key);
        }
        k.push_back(real_key("residual_gradient_mG_per_cm",
                             [](RunConfig& c) -> double& { return c.evo.residual_gradient_mG_per_cm; }, -inf, inf, false, false));
        {
            Key key{"potential", [](RunConfig& c, const std::string& v) { c.evo.potential = parse_potential(v); },
                    [](const RunConfig& c) { return to_string(c.evo.potential); }, false};
            k.push_back(key);
        }
        {
            Key key{"seed",
                    [](RunConfig& c, const std::string& v) {
                        const auto s = parse_int(v);
                        if (s < 0) throw InvalidParameter("value " + v + " must be non-negative");
                        c.evo.rng_seed = std::uint64_t(s);
                    },
                    [](const RunConfig& c) { return std::to_string(c.evo.rng_seed); }, false};
            k.push_back(key);
        }
        // state preparation
        {
            Key key{"profile", [](RunConfig& c, const std::string& v) { c.profile = parse_profile(v); },
                    [](const RunConfig& c) { return to_string(c.profile); }, false};
            k.push_back(key);
        }
        k.push_back(real_key("box_fraction", [](RunConfig& c) -> double& { return c.box_fraction; }, 0, 1, true, false));
        k.push_back(real_key("pitch_um", [](RunConfig& c) -> double& { return c.pitch_um; }, 0, inf, false, true));
        k.push_back(real_key("noise", [](RunConfig& c) -> double& { return c.noise_amplitude; }, 0, 1, false, false));
        k.push_back(real_key("cancel_pulses_khz", [](RunConfig& c) -> double& { return c.cancel_rate_khz; }, 0, 1e3, false, false));
        // analysis
        k.push_back(real_key("k_cut", [](RunConfig& c) -> double& { return c.regions.k_cut; }, 0, inf, true, false));
        k.push_back(real_key("k_lo", [](RunConfig& c) -> double& { return c.regions.k_lo; }, 0, inf, true, false));
        k.push_back(real_key("k_hi", [](RunConfig& c) -> double& { return c.regions.k_hi; }, 0, inf, true, false));
        k.push_back(real_key("vortex_threshold", [](RunConfig& c) -> double& { return c.vortex_threshold; }, 0, 1, true, false));
        {
            Key key{"write_snapshots",
                    [](RunConfig& c, const std::string& v) {
                        if (v == "true" || v == "1") c.write_snapshots = true;
                        else if (v == "false" || v == "0") c.write_snapshots = false;
                        else throw InvalidParameter("expected true|false, got '" + v + "'");
                    },
                    [](const RunConfig& c) { return std::string(c.write_snapshots ? "true" : "false"); }, false};
            k.push_back(key);
        }
        return k;
    }();
    return table;
}

} // namespace detail

/// Reference experimental parameters on the desk-scale 64 x 512 grid.
inline RunConfig preset(const std::string& name) {
    if (name == "defaults-paper") return RunConfig{};
    throw ConfigError("unknown preset '" + name + "' (available: defaults-paper)");
}

/// Parses `key = value` lines ('#' starts a comment). Without a preset every
/// required key must be present.
inline RunConfig parse_config(const std::string& text, const std::string& preset_name = "") {
    RunConfig cfg = preset_name.empty() ? RunConfig{} : preset(preset_name);
    std::map<std::string, const detail::Key*> index;
    for (const auto& k : detail::keys()) index[k.name] = &k;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second->set(cfg, value);
        } catch (const InvalidParameter& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    if (preset_name.empty())
        for (const auto& k : detail::keys())
            if (k.required_without_preset && !seen.count(k.name))
                throw ConfigError("missing required key '" + k.name + "' (or use a preset)");
    try {
        cfg.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

/// Every key, one per line, in table order; parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : detail::keys()) out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

/// 64-bit FNV-1a of the serialized configuration, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialize(cfg)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace dipspin
