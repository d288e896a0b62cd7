#pragma once

// Deterministic per-index random streams. Every sampling loop derives the
// generator for sample i from (seed, stream, i), so results do not depend on
// how the loop is split across threads.

#include <cstdint>
#include <random>

namespace triple_lab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return std::mt19937_64(s);
}

} // namespace triple_lab
