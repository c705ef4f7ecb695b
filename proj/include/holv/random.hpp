#pragma once

#include <cstdint>
#include <random>

namespace holv {

// Deterministic generator keyed by (seed, stream). Each independent job in a
// batch takes its own stream so results do not depend on scheduling.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits; the mapping is fixed so the
    // sequence is identical across standard library implementations.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform on (lo, hi].
    double uniform_open_low(double lo, double hi) { return hi - (hi - lo) * uniform(); }
    int index(int n);

private:
    std::mt19937_64 engine_;
};

}  // namespace holv
