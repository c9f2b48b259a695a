#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "dynamics.hpp"
#include "fft.hpp"
#include "field.hpp"

namespace dipspin {

/// |M~(kx, kz)|^2 summed over the three spin components on the full grid.
/// Normalized so that sum_k P(k) = sum_r |M(r)|^2 (Parseval, unnormalized DFT / N).
struct PowerSpectrum {
    Grid2D grid;
    RVec p;

    double k(int i, int j) const { return std::hypot(grid.kx(i), grid.kz(j)); }
    double sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }
};

inline PowerSpectrum power_spectrum(const MagnetizationField& m) {
    const auto& g = m.grid;
    PowerSpectrum ps{g, RVec(g.size(), 0.0)};
    Fft2D fft(g.nx, g.nz);
    CVec work(g.size());
    const double inv_n = 1.0 / double(g.size());
    for (const auto& comp : m.m) {
        std::transform(comp.begin(), comp.end(), work.begin(), [](double v) { return cplx(v, 0.0); });
        fft.forward(work.data());
        for (std::size_t k = 0; k < g.size(); ++k) ps.p[k] += std::norm(work[k]) * inv_n;
    }
    return ps;
}

/// Central disc |k| <= k_cut (long-range order) and annulus
/// k_lo <= |k| <= k_hi (short-range order), in rad/um.
struct RegionSpec {
    double k_cut = 2.0 * units::pi / 25.0;
    double k_lo = 2.0 * units::pi / 15.0;
    double k_hi = 2.0 * units::pi / 6.0;

    void validate(const Grid2D& g) const {
        units::require(k_cut > 0 && k_cut < k_lo && k_lo < k_hi, "regions must satisfy 0 < k_cut < k_lo < k_hi");
        units::require(k_hi < g.k_nyquist(), "annulus exceeds the grid Nyquist wavevector");
    }
};

struct OrderParameters {
    double long_order = 0;
    double short_order = 0;
    double total = 0;
};

/// Mean spectral power at |k| > 2 k_hi: the flat floor left by white noise.
inline double estimate_background(const PowerSpectrum& ps, const RegionSpec& r) {
    double sum = 0;
    long count = 0;
    for (int i = 0; i < ps.grid.nx; ++i)
        for (int j = 0; j < ps.grid.nz; ++j)
            if (ps.k(i, j) > 2.0 * r.k_hi) {
                sum += ps.p[ps.grid.index(i, j)];
                ++count;
            }
    return count ? sum / double(count) : 0.0;
}

inline OrderParameters order_parameters(const PowerSpectrum& ps, const RegionSpec& r, double background = 0.0) {
    r.validate(ps.grid);
    OrderParameters out;
    for (int i = 0; i < ps.grid.nx; ++i)
        for (int j = 0; j < ps.grid.nz; ++j) {
            const double v = std::max(0.0, ps.p[ps.grid.index(i, j)] - background);
            const double k = ps.k(i, j);
            out.total += v;
            if (k <= r.k_cut) out.long_order += v;
            else if (k >= r.k_lo && k <= r.k_hi) out.short_order += v;
        }
    return out;
}

/// Radially binned spectrum; bin b covers [b dk, (b+1) dk) with dk the
/// coarser of the two fundamental wavevectors.
struct RadialSpectrum {
    double dk;
    std::vector<double> power;
    double center(std::size_t b) const { return (double(b) + 0.5) * dk; }
};

inline RadialSpectrum radial_spectrum(const PowerSpectrum& ps) {
    const double dk = 2.0 * units::pi / std::min(ps.grid.lx, ps.grid.lz);
    RadialSpectrum out{dk, {}};
    for (int i = 0; i < ps.grid.nx; ++i)
        for (int j = 0; j < ps.grid.nz; ++j) {
            const auto b = std::size_t(ps.k(i, j) / dk);
            if (b >= out.power.size()) out.power.resize(b + 1, 0.0);
            out.power[b] += ps.p[ps.grid.index(i, j)];
        }
    return out;
}

/// |k| of the radial bin (above k_floor) whose power grew the most between
/// two spectra on the same grid.
inline double dominant_emergent_wavenumber(const PowerSpectrum& before, const PowerSpectrum& after, double k_floor) {
    require_same_grid(before.grid, after.grid);
    const auto a = radial_spectrum(before), b = radial_spectrum(after);
    double best = -std::numeric_limits<double>::infinity(), k_best = 0;
    for (std::size_t i = 0; i < b.power.size(); ++i) {
        if (b.center(i) < k_floor) continue;
        const double gain = b.power[i] - (i < a.power.size() ? a.power[i] : 0.0);
        if (gain > best) {
            best = gain;
            k_best = b.center(i);
        }
    }
    return k_best;
}

struct OrderSample {
    double t_ms = 0;
    OrderParameters order;
    int vortex_count = 0;
    int net_charge = 0;
    EnergyTerms energy;
};

using OrderParamSeries = std::vector<OrderSample>;

/// Least-squares slope (per second) of short_order / total_power against
/// time. Without an explicit window the fit runs from the first sample until
/// short_order first rises above half its final value; a series that never
/// crosses (already above, or flat) is fitted whole.
inline double growth_rate(const OrderParamSeries& series, std::optional<std::pair<double, double>> window = {}) {
    std::vector<double> t, y;
    if (!window && !series.empty()) {
        const double target = 0.5 * series.back().order.short_order;
        double t_end = series.back().t_ms;
        for (std::size_t i = 1; i < series.size(); ++i)
            if (series[i].order.short_order > target && series[i - 1].order.short_order <= target) {
                t_end = series[i].t_ms;
                break;
            }
        window = std::pair{series.front().t_ms, t_end};
    }
    for (const auto& s : series) {
        if (window && (s.t_ms < window->first || s.t_ms > window->second)) continue;
        t.push_back(s.t_ms * 1e-3);
        y.push_back(s.order.total > 0 ? s.order.short_order / s.order.total : 0.0);
    }
    units::require(t.size() >= 4, "growth-rate window needs at least 4 samples");
    const double n = double(t.size());
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - tm) * (t[i] - tm);
        sxy += (t[i] - tm) * (y[i] - ym);
    }
    units::require(sxx > 0, "degenerate growth-rate window (all times equal)");
    return sxy / sxx;
}

/// G(dr) = sum_r M(r+dr).M(r) / sum_r n(r+dr) n(r), periodic. Displacements
/// with a vanishing denominator are NaN (undefined).
struct CorrelationMap {
    Grid2D grid;
    RVec g;
    bool defined(int i, int j) const { return !std::isnan(g[grid.index(i, j)]); }
    double at(int i, int j) const { return g[grid.index(i, j)]; }
};

inline CorrelationMap correlation(const MagnetizationField& m) {
    const auto& g = m.grid;
    Fft2D fft(g.nx, g.nz);
    CVec work(g.size());
    RVec num(g.size(), 0.0), den(g.size(), 0.0);
    auto autocorr = [&](const RVec& f, RVec& acc) {
        std::transform(f.begin(), f.end(), work.begin(), [](double v) { return cplx(v, 0.0); });
        fft.forward(work.data());
        for (auto& v : work) v = std::norm(v);
        fft.backward(work.data());
        for (std::size_t k = 0; k < g.size(); ++k) acc[k] += work[k].real() / double(g.size());
    };
    for (const auto& c : m.m) autocorr(c, num);
    autocorr(m.n, den);
    units::require(den[0] > 0, "correlation needs a positive density somewhere");
    CorrelationMap out{g, RVec(g.size())};
    for (std::size_t k = 0; k < g.size(); ++k)
        out.g[k] = den[k] > 1e-12 * den[0] ? num[k] / den[k] : std::numeric_limits<double>::quiet_NaN();
    return out;
}

struct Vortex {
    double x_um;
    double z_um;
    int charge;
};

struct VortexSet {
    std::vector<Vortex> vortices;
    double threshold_frac;

    int count() const { return int(vortices.size()); }
    int net_charge() const {
        int q = 0;
        for (const auto& v : vortices) q += v.charge;
        return q;
    }
};

/// Polar-core spin vortices from the winding of arg(Mx + i My) around
/// elementary plaquettes (counterclockwise in the x-z plane is +1).
///
/// A plaquette whose four corners all carry |M_perp| above
/// threshold_frac * max |M_perp| is resolved; resolved plaquettes winding by
/// +-2pi are candidates, and adjacent candidates of equal charge merge into
/// one vortex at their centroid. A polar core wider than a cell leaves no
/// resolved plaquette, so plaquettes with a low-|M_perp| corner but full
/// density (n above threshold_frac * max n at every corner) form core
/// regions; each region, grown by one ring of plaquettes, is scored by its
/// summed winding, which equals the winding along a surrounding path of
/// non-zero magnetization. Core regions touching low-density plaquettes have
/// no such path and are skipped.
inline VortexSet detect_vortices(const MagnetizationField& m, double threshold_frac = 0.15) {
    units::require(threshold_frac > 0 && threshold_frac < 1, "threshold_frac must be in (0, 1)");
    const auto& g = m.grid;
    RVec theta(g.size()), amp(g.size());
    double amax = 0, nmax = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        theta[k] = std::atan2(m.m[1][k], m.m[0][k]);
        amp[k] = m.transverse(k);
        amax = std::max(amax, amp[k]);
        nmax = std::max(nmax, m.n[k]);
    }
    VortexSet out{{}, threshold_frac};
    if (amax == 0) return out;
    const double floor = threshold_frac * amax, nfloor = threshold_frac * nmax;
    auto wrap = [](double d) { return std::remainder(d, 2.0 * units::pi); };

    enum Kind : char { vacuum, resolved, core };
    std::vector<int> winding(g.size(), 0);
    std::vector<char> kind(g.size(), vacuum);
    RVec low_weight(g.size(), 0.0);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const int ip = (i + 1) % g.nx, jp = (j + 1) % g.nz;
            const std::size_t c[4] = {g.index(i, j), g.index(ip, j), g.index(ip, jp), g.index(i, jp)};
            double w = 0;
            for (int e = 0; e < 4; ++e) w += wrap(theta[c[(e + 1) % 4]] - theta[c[e]]);
            const auto p = g.index(i, j);
            winding[p] = int(std::lround(w / (2.0 * units::pi)));
            const double amin = std::min({amp[c[0]], amp[c[1]], amp[c[2]], amp[c[3]]});
            const double nmin = std::min({m.n[c[0]], m.n[c[1]], m.n[c[2]], m.n[c[3]]});
            if (amin >= floor) kind[p] = resolved;
            else if (nmin >= nfloor) {
                kind[p] = core;
                low_weight[p] = floor - 0.25 * (amp[c[0]] + amp[c[1]] + amp[c[2]] + amp[c[3]]);
            }
        }

    auto neighbours = [&](int a, int b, auto&& visit) {
        for (int da = -1; da <= 1; ++da)
            for (int db = -1; db <= 1; ++db) {
                const int na = a + da, nb = b + db;
                if ((da || db) && na >= 0 && nb >= 0 && na < g.nx && nb < g.nz) visit(na, nb);
            }
    };
    auto centre = [&](int a, int b) { return std::pair{g.x(a) + 0.5 * g.dx(), g.z(b) + 0.5 * g.dz()}; };

    std::vector<char> seen(g.size(), 0);
    std::vector<std::pair<int, int>> stack, members;

    // core regions first; their rings claim any resolved candidates they touch
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            if (kind[g.index(i, j)] != core || seen[g.index(i, j)]) continue;
            members.clear();
            stack.assign(1, {i, j});
            seen[g.index(i, j)] = 1;
            bool open = false;
            double wx = 0, wz = 0, wsum = 0;
            while (!stack.empty()) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                members.push_back({a, b});
                const double w = low_weight[g.index(a, b)];
                const auto [cx, cz] = centre(a, b);
                wx += w * cx;
                wz += w * cz;
                wsum += w;
                neighbours(a, b, [&](int na, int nb) {
                    const auto idx = g.index(na, nb);
                    if (kind[idx] == vacuum) open = true;
                    if (kind[idx] == core && !seen[idx]) {
                        seen[idx] = 1;
                        stack.push_back({na, nb});
                    }
                });
            }
            // ring of resolved plaquettes around the region
            std::vector<std::size_t> ring;
            for (const auto& [a, b] : members)
                neighbours(a, b, [&](int na, int nb) {
                    const auto idx = g.index(na, nb);
                    if (kind[idx] == resolved && seen[idx] != 2) {
                        seen[idx] = 2;
                        ring.push_back(idx);
                    }
                });
            int q = 0;
            for (const auto& [a, b] : members) q += winding[g.index(a, b)];
            for (auto idx : ring) q += winding[idx];
            if (open) continue;
            for (int v = 0; v < std::abs(q); ++v) out.vortices.push_back({wx / wsum, wz / wsum, q > 0 ? 1 : -1});
        }

    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const auto p0 = g.index(i, j);
            const int q = winding[p0];
            if (kind[p0] != resolved || seen[p0] || (q != 1 && q != -1)) continue;
            double sx = 0, sz = 0;
            int cells = 0;
            stack.assign(1, {i, j});
            seen[p0] = 1;
            while (!stack.empty()) {
                const auto [a, b] = stack.back();
                stack.pop_back();
                const auto [cx, cz] = centre(a, b);
                sx += cx;
                sz += cz;
                ++cells;
                neighbours(a, b, [&](int na, int nb) {
                    const auto idx = g.index(na, nb);
                    if (kind[idx] == resolved && !seen[idx] && winding[idx] == q) {
                        seen[idx] = 1;
                        stack.push_back({na, nb});
                    }
                });
            }
            out.vortices.push_back({sx / cells, sz / cells, q});
        }
    return out;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    units::require(a.size() == b.size() && a.size() >= 2, "spearman needs two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * double(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = double(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace dipspin
