#pragma once

// Plain-text snapshot files: `key=value` header lines, an `end_header`
// marker, then one site per line (row-major, z fastest):
//   x z n Mx My Mz re(psi+) im(psi+) re(psi0) im(psi0) re(psi-) im(psi-)

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "field.hpp"

namespace dipspin {

struct Snapshot {
    double time_ms = 0;
    std::string config_hash;
    SpinorField state;
};

inline constexpr int snapshot_digits = 12;

namespace detail {
inline void put(std::string& out, double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, snapshot_digits);
    out.append(buf, r.ptr);
}
} // namespace detail

inline void write_snapshot(const std::string& path, const Snapshot& s) {
    const auto& g = s.state.grid;
    const auto m = magnetization(s.state);
    std::string out;
    out.reserve(g.size() * 12 * 20 + 512);
    char head[512];
    std::snprintf(head, sizeof head,
                  "# dipspin snapshot\ntime_ms=%.17g\nnx=%d\nnz=%d\nlx_um=%.17g\nlz_um=%.17g\n"
                  "units=length:um density:atoms/um^2 magnetization:gF_muB/um^2\nconfig_hash=%s\n"
                  "columns=x z n Mx My Mz re_p im_p re_0 im_0 re_m im_m\nend_header\n",
                  s.time_ms, g.nx, g.nz, g.lx, g.lz, s.config_hash.c_str());
    out += head;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const auto k = g.index(i, j);
            const double vals[12] = {g.x(i), g.z(j), m.n[k], m.m[0][k], m.m[1][k], m.m[2][k],
                                     s.state.psi[0][k].real(), s.state.psi[0][k].imag(),
                                     s.state.psi[1][k].real(), s.state.psi[1][k].imag(),
                                     s.state.psi[2][k].real(), s.state.psi[2][k].imag()};
            for (int c = 0; c < 12; ++c) {
                if (c) out += ' ';
                detail::put(out, vals[c]);
            }
            out += '\n';
        }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidParameter("cannot write snapshot '" + path + "'");
    f << out;
    if (!f) throw InvalidParameter("failed writing snapshot '" + path + "'");
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidParameter("cannot open snapshot '" + path + "'");
    std::map<std::string, std::string> header;
    std::string line;
    bool ended = false;
    while (std::getline(f, line)) {
        if (line == "end_header") {
            ended = true;
            break;
        }
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq != std::string::npos) header[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const char* key) {
        const auto it = header.find(key);
        if (it == header.end()) throw InvalidParameter(path + ": missing header key '" + key + "'");
        return it->second;
    };
    if (!ended) throw InvalidParameter(path + ": no end_header marker");
    Grid2D g{std::stoi(need("nx")), std::stoi(need("nz")), std::stod(need("lx_um")), std::stod(need("lz_um"))};
    g.validate();
    Snapshot s{std::stod(need("time_ms")), header["config_hash"], SpinorField(g)};
    std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const char* p = body.data();
    const char* end = p + body.size();
    double vals[12];
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (double& v : vals) {
            while (p < end && (*p == ' ' || *p == '\n' || *p == '\r')) ++p;
            auto r = std::from_chars(p, end, v);
            if (r.ec != std::errc()) throw InvalidParameter(path + ": malformed record " + std::to_string(k));
            p = r.ptr;
        }
        s.state.set(k, {cplx(vals[6], vals[7]), cplx(vals[8], vals[9]), cplx(vals[10], vals[11])});
    }
    return s;
}

} // namespace dipspin
