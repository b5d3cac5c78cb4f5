#pragma once

#include <cstdint>
#include <random>

namespace ocp {

// splitmix64 step; used to derive independent sub-stream seeds from a master
// seed so that per-path results never depend on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for sub-stream `stream` of logical unit `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t stream = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s = h ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    h = splitmix64(s);
    s = h ^ (stream * 0xda942042e4dd58b5ULL + 1ULL);
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace ocp
