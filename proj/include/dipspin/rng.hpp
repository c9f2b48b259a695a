#pragma once

// Seed splitting: a run seed fans out into independent per-purpose streams
// (mt19937_64 seeded through seed_seq with the purpose tag appended), so
// adding draws to one purpose never perturbs another.

#include <cstdint>
#include <random>

namespace dipspin {

enum class Stream : std::uint32_t { noise = 1, schedule = 2, synthetic = 3 };

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream purpose) {
    std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                      std::uint32_t(purpose)};
    return std::mt19937_64(seq);
}

} // namespace dipspin
