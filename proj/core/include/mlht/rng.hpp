#pragma once

#include <cmath>
#include <cstdint>

namespace mlht {

/// Counter-seeded xoshiro256++ stream. Each (master seed, level, realization,
/// history) tuple is hashed through splitmix64 into an independent state, so
/// any history can be simulated on any worker and still draw the exact same
/// numbers. History index 0 is reserved for per-realization draws.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t level,
              std::uint64_t realization, std::uint64_t history)
    {
        std::uint64_t h = master_seed;
        h = splitmix(h ^ (0x9e3779b97f4a7c15ULL + level));
        h = splitmix(h ^ (0xbf58476d1ce4e5b9ULL + realization));
        h = splitmix(h ^ (0x94d049bb133111ebULL + history));
        for (auto& word : state_) {
            h = splitmix(h);
            word = h;
        }
        // xoshiro must not start from the all-zero state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Unit-rate exponential deviate, strictly positive and finite.
    double exponential()
    {
        double u = uniform();
        return -std::log1p(-u); // u < 1 always, so the result is finite
    }

    /// Isotropic direction cosine on [-1, 1] excluding exactly 0.
    double direction_cosine()
    {
        for (;;) {
            double mu = uniform(-1.0, 1.0);
            if (mu != 0.0) return mu;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

} // namespace mlht
