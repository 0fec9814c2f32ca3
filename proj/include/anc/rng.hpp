#pragma once

#include <cstdint>

namespace anc {

// xoshiro256** 1.0 (Blackman & Vigna, public domain), seeded via SplitMix64.
// Used instead of <random> engines so a given seed yields the same stream on
// every platform and standard library. See README for the exact algorithm.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t s = z;
            s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
            s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
            word = s ^ (s >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    /// Zero-mean unit-variance deviate: sum of 12 uniforms minus 6.
    /// Bounded to [-6, 6]; no libm calls, so bit-portable across platforms.
    double next_gaussian() {
        double acc = 0.0;
        for (int i = 0; i < 12; ++i) acc += next_unit();
        return acc - 6.0;
    }

    /// Uniform integer in [0, bound); bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace anc
