#pragma once

#include <cstdint>
#include <random>

namespace powermarket {

// Seed derivation for independent streams (splitmix64 finalizer applied to
// the master seed and the stream index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

// One random stream. Wraps a 64-bit Mersenne Twister and converts raw words
// to doubles and indices itself, so the sequence of values does not depend
// on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace powermarket
