#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "scatter2d/types.hpp"

namespace scatter2d {

// splitmix64 finalizer; used both as a generator step and to derive
// independent sub-seeds so that adding parallelism never reorders draws.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

// Standard normal draws with a fully specified algorithm (mt19937_64 +
// Box-Muller), so sequences are reproducible across platforms. Each draw
// consumes exactly two engine outputs.
class GaussianSequence {
public:
    explicit GaussianSequence(std::uint64_t seed) : engine_(seed) {}

    double next() {
        const double u1 = to_unit_open(engine_());   // (0,1]
        const double u2 = to_unit_closed(engine_()); // [0,1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

private:
    static double to_unit_closed(std::uint64_t x) {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }
    static double to_unit_open(std::uint64_t x) {
        return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
};

}  // namespace scatter2d
