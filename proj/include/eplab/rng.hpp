#pragma once

#include <cstdint>

namespace eplab {

// Counter-based splittable generator built on the SplitMix64 finalizer.
//
// A stream is keyed by (seed, stream index); output j is
// mix64(key + j * 0x9e3779b97f4a7c15). Streams with distinct indices are
// independent for all practical purposes, and a draw depends only on
// (seed, stream, counter) — never on scheduling — so parallel sweeps keyed
// by trial index are reproducible. The algorithm is fixed per release.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed) ^ (stream * 0xda942042e4dd58b5ull))) {}

    std::uint64_t next_u64() {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ull);
    }

    // Exactly uniform on [0, n) via multiply-shift with rejection.
    std::uint32_t uniform_below(std::uint32_t n) {
        std::uint64_t m = n;
        unsigned __int128 prod =
            static_cast<unsigned __int128>(next_u64()) * m;
        auto lo = static_cast<std::uint64_t>(prod);
        if (lo < m) {
            const std::uint64_t threshold = (0 - m) % m;
            while (lo < threshold) {
                prod = static_cast<unsigned __int128>(next_u64()) * m;
                lo = static_cast<std::uint64_t>(prod);
            }
        }
        return static_cast<std::uint32_t>(prod >> 64);
    }

    // Uniform in [0, 1); 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace eplab
