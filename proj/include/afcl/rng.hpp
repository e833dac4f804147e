#pragma once

#include <cstdint>
#include <random>

namespace afcl {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to fan a single seed out into independent streams.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for stream `stream` at position `index` derived from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(base) ^ stream) ^ index);
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

// Stream identifiers for derive_seed.
namespace streams {
inline constexpr std::uint64_t client_init = 1;
inline constexpr std::uint64_t server_init = 2;
inline constexpr std::uint64_t participation = 3;
inline constexpr std::uint64_t partition = 4;
inline constexpr std::uint64_t trial = 5;
inline constexpr std::uint64_t shuffle = 6;
inline constexpr std::uint64_t experiment = 7;
}  // namespace streams

}  // namespace afcl
