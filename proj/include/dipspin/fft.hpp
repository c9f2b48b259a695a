#pragma once

// Thin RAII layer over FFTW for the 2D transforms used throughout.
// Plans are built with FFTW_ESTIMATE so the chosen algorithm (and hence
// the floating-point result) never depends on timing measurements.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <vector>

namespace dipspin {

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) {
        if (auto* p = static_cast<T*>(fftw_malloc(n * sizeof(T)))) return p;
        throw std::bad_alloc();
    }
    void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using cplx = std::complex<double>;
using CVec = std::vector<cplx, FftwAllocator<cplx>>;
using RVec = std::vector<double, FftwAllocator<double>>;

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct PlanSet {
    PlanPtr c2c_fwd, c2c_bwd, r2c, c2r;
};

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline const PlanSet& plans_for(int nx, int nz) {
    static std::map<std::pair<int, int>, std::unique_ptr<PlanSet>> cache;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[{nx, nz}];
    if (!slot) {
        slot = std::make_unique<PlanSet>();
        const std::size_t n = std::size_t(nx) * nz;
        const std::size_t nh = std::size_t(nx) * (nz / 2 + 1);
        CVec a(n), h(nh);
        RVec r(n);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* ph = reinterpret_cast<fftw_complex*>(h.data());
        slot->c2c_fwd.reset(fftw_plan_dft_2d(nx, nz, pa, pa, FFTW_FORWARD, FFTW_ESTIMATE));
        slot->c2c_bwd.reset(fftw_plan_dft_2d(nx, nz, pa, pa, FFTW_BACKWARD, FFTW_ESTIMATE));
        slot->r2c.reset(fftw_plan_dft_r2c_2d(nx, nz, r.data(), ph, FFTW_ESTIMATE));
        slot->c2r.reset(fftw_plan_dft_c2r_2d(nx, nz, ph, r.data(), FFTW_ESTIMATE));
    }
    return *slot;
}

} // namespace detail

/// Unnormalized 2D transforms on an nx-by-nz row-major (z fastest) array.
/// backward(forward(f)) == nx*nz*f.
class Fft2D {
public:
    Fft2D(int nx, int nz) : nx_(nx), nz_(nz), plans_(&detail::plans_for(nx, nz)) {}

    int nx() const { return nx_; }
    int nz() const { return nz_; }
    std::size_t size() const { return std::size_t(nx_) * nz_; }
    std::size_t half_size() const { return std::size_t(nx_) * (nz_ / 2 + 1); }

    // Complex transforms are in place.
    void forward(cplx* data) const { run(plans_->c2c_fwd.get(), data); }
    void backward(cplx* data) const { run(plans_->c2c_bwd.get(), data); }

    // Real transforms use the half spectrum of size nx*(nz/2+1).
    // c2r destroys its input, so it takes a mutable buffer.
    void forward_real(const double* in, cplx* out) const {
        fftw_execute_dft_r2c(plans_->r2c.get(), const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }
    void backward_real(cplx* in, double* out) const {
        fftw_execute_dft_c2r(plans_->c2r.get(), reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    static void run(fftw_plan p, cplx* data) {
        auto* d = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(p, d, d);
    }

    int nx_, nz_;
    const detail::PlanSet* plans_;
};

} // namespace dipspin
