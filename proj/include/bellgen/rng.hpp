#pragma once

#include <array>
#include <cstdint>

namespace bellgen {

// Stream/seed plumbing. Two classic public-domain generators:
//
//   splitmix64 (Steele, Lea, Flood 2014) -- a counter-based mixer used only
//   for seed derivation. Its k-th output from initial state s is
//   mix(s + (k+1)*GAMMA), so sub-seeds are random-access.
//
//   xoshiro256** 1.0 (Blackman, Vigna 2018) -- the event stream generator.
//   Fully specified by its update rule, hence identical output on every
//   platform for a given seed.

inline constexpr uint64_t kSplitmix64Gamma = 0x9E3779B97F4A7C15ULL;

constexpr uint64_t splitmix64_mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr uint64_t splitmix64_next(uint64_t& state) {
    state += kSplitmix64Gamma;
    return splitmix64_mix(state);
}

/// Sub-seed for shard k of a record stream: the k-th splitmix64 output of
/// the stream seed. This is the seed-splitting contract that makes sharded
/// generation order- and worker-count-independent.
constexpr uint64_t shard_seed(uint64_t seed, uint64_t shard_index) {
    return splitmix64_mix(seed + (shard_index + 1) * kSplitmix64Gamma);
}

class Xoshiro256ss {
public:
    /// Expands a 64-bit seed into the 256-bit state via four splitmix64
    /// outputs (the seeding procedure recommended by the authors). The
    /// resulting state cannot be all-zero.
    explicit constexpr Xoshiro256ss(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64_next(sm);
    }

    constexpr uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform deviate in [0, 1) from the top 53 bits.
    constexpr double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static constexpr uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<uint64_t, 4> s_{};
};

} // namespace bellgen
