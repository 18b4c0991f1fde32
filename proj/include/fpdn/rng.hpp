#pragma once

#include <cmath>
#include <cstdint>

namespace fpdn {

// splitmix64: tiny, fully portable, identical streams on every platform.
// All randomness in the project (init, noise, shuffling, synthesis) goes
// through this so runs are reproducible bit-for-bit from a single seed.
struct Rng {
    uint64_t s;
    bool have_spare = false;
    double spare = 0.0;

    explicit Rng(uint64_t seed) : s(seed) {}

    uint64_t next() {
        uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    uint64_t below(uint64_t n) { return next() % n; }

    // Standard normal via Box-Muller; second sample cached.
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare = r * std::sin(t);
        have_spare = true;
        return r * std::cos(t);
    }
};

// Derive an independent stream from a base seed and a stream index, so e.g.
// the noise drawn for image i in epoch e never collides with init randomness.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed ^ (stream * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace fpdn
