#pragma once

#include <cmath>
#include <cstdint>

#include "isar/common.hpp"

namespace isar {

// Deterministic, implementation-independent RNG. std::normal_distribution is
// libstdc++-specific, so normals come from an explicit Box-Muller transform on
// a xoshiro256++ stream. Substreams are derived by hashing (seed, tag, index)
// so frame-parallel synthesis is order independent.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_spare_ = false;
    }

    static Rng substream(uint64_t seed, uint64_t tag, uint64_t index = 0) {
        uint64_t sm = seed;
        uint64_t mixed = splitmix64(sm) ^ (0x9e3779b97f4a7c15ull * (tag + 1));
        mixed ^= splitmix64(sm) + 0xd1b54a32d192ed03ull * (index + 1);
        return Rng(mixed);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        return ((next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint64_t uniform_index(uint64_t n) { return next_u64() % n; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // CN(0, variance): circularly symmetric complex Gaussian.
    cdouble complex_gaussian(double variance = 1.0) {
        double s = std::sqrt(variance / 2.0);
        return {s * gaussian(), s * gaussian()};
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_;
};

}  // namespace isar
