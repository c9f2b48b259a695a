// Minimal library use: derived constants, then a short helix run on a
// coarse grid with the order parameters printed every 10 ms.

#include <cstdio>

#include <dipspin/run.hpp>

int main() {
    using namespace dipspin;

    RunConfig c = preset("defaults-paper");
    c.grid = {32, 256, 48.0, 460.0};
    c.evo.t_final_ms = 40.0;
    c.evo.snapshot_every_ms = 10.0;
    c.pitch_um = 60.0;

    const auto d = derive_params(c.phys);
    std::printf("c0_2d %.4f  c2_2d %.5f  c_dd %.5f  q %.4f Hz  E_d %.4f Hz\n", d.c0_2d, d.c2_2d, d.c_dd, d.q_hz,
                d.e_d_hz);

    for (const auto& s : run_simulate(c))
        std::printf("t %5.1f ms  long %.4e  short %.4e  vortices %d  E_dd %.4f Hz\n", s.t_ms, s.order.long_order,
                    s.order.short_order, s.vortex_count, s.energy.dipolar);
}
