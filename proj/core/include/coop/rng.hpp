#ifndef COOP_RNG_HPP
#define COOP_RNG_HPP

#include <cstdint>

namespace coop {

/// SplitMix64 (Steele/Lea/Flood). Used only to derive generator state from
/// (seed, stream) pairs; defined bit-exactly so other implementations can
/// reproduce every draw.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman/Vigna), seeded through SplitMix64.
///
/// Stream derivation for (seed, stream):
///   key      = SplitMix64(stream).next()
///   words    = four successive outputs of SplitMix64(seed ^ key)
/// Floating-point draws take the upper 53 bits over 2^53.
class Xoshiro256StarStar {
public:
    Xoshiro256StarStar(std::uint64_t seed, std::uint64_t stream) {
        const std::uint64_t key = SplitMix64(stream).next();
        SplitMix64 sm(seed ^ key);
        for (auto& word : s_) {
            word = sm.next();
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform draw in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform draw in (0, 1].
    double next_double_positive() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform draw in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [lo, hi], both inclusive.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<double>(hi - lo + 1);
        const int v = lo + static_cast<int>(next_double() * span);
        return v > hi ? hi : v;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

}  // namespace coop

#endif
