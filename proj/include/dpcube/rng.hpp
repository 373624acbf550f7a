#pragma once

#include <cstdint>

namespace dpcube {

// splitmix64 step; used for seeding and for deriving independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** stream. Self-contained so that a fixed seed produces the same
// byte sequence on every platform, which the reproducibility contract needs.
// One stream per logical task; derive() gives statistically independent
// child streams for concurrent trials.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Child stream keyed by (a, b); independent of the parent's future output.
    RngStream derive(std::uint64_t a, std::uint64_t b = 0) const {
        std::uint64_t sm = state_[0] ^ (state_[2] + 0x9e3779b97f4a7c15ULL);
        splitmix64(sm);
        sm ^= a * 0xff51afd7ed558ccdULL;
        splitmix64(sm);
        sm ^= b * 0xc4ceb9fe1a85ec53ULL;
        return RngStream(splitmix64(sm));
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

    // Uniform on (0, 1]; never returns 0 so log() stays finite.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double next_half_open() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace dpcube
