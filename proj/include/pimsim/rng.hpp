#pragma once

#include <cmath>
#include <cstdint>

namespace pimsim {

// SplitMix64: used both as a standalone generator and to derive
// per-trajectory streams from (master seed, index). Reference:
// Steele, Lea, Flood, "Fast splittable pseudorandom number generators".
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Small, fast, reproducible across
// platforms; stdlib distributions are deliberately avoided so that
// streams are bit-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    // Stream for trajectory `index` under `master` seed. Mixing the index
    // through SplitMix64 keeps streams decorrelated no matter how the
    // scheduler assigns trajectories to workers.
    static Rng stream(std::uint64_t master, std::uint64_t index) {
        SplitMix64 sm(master ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        return Rng(sm.next());
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as an argument of log().
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    bool coin() { return (next_u64() & 1ULL) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace pimsim
