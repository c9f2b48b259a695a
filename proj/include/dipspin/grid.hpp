#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <string>

#include "units.hpp"

namespace dipspin {

/// Periodic 2D grid over the imaged x-z plane. Arrays are row-major with z
/// fastest: site (i, j) lives at i * nz + j. Coordinates are centred, and
/// wavevectors follow the FFT ordering (0, 1, ..., n/2-1, -n/2, ..., -1).
struct Grid2D {
    int nx = 64;
    int nz = 64;
    double lx = 64.0; // um
    double lz = 64.0; // um

    double dx() const { return lx / nx; }
    double dz() const { return lz / nz; }
    double cell_area() const { return dx() * dz(); }
    std::size_t size() const { return std::size_t(nx) * std::size_t(nz); }
    std::size_t index(int i, int j) const { return std::size_t(i) * nz + j; }

    double x(int i) const { return (i - nx / 2) * dx(); }
    double z(int j) const { return (j - nz / 2) * dz(); }

    static int mode_number(int idx, int n) { return idx < n / 2 ? idx : idx - n; }
    double kx(int i) const { return 2.0 * units::pi / lx * mode_number(i, nx); }
    double kz(int j) const { return 2.0 * units::pi / lz * mode_number(j, nz); }
    double k_nyquist() const { return std::min(units::pi / dx(), units::pi / dz()); }

    void validate() const {
        auto pow2 = [](int n) { return n >= 8 && std::has_single_bit(unsigned(n)); };
        units::require(pow2(nx) && pow2(nz), "grid sizes must be powers of two >= 8 (got " +
                                                 std::to_string(nx) + "x" + std::to_string(nz) + ")");
        units::require(lx > 0 && lz > 0 && std::isfinite(lx) && std::isfinite(lz),
                       "grid extents must be positive");
    }

    bool operator==(const Grid2D&) const = default;
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b) {
    if (!(a == b)) throw InvalidParameter("grid mismatch");
}

} // namespace dipspin
