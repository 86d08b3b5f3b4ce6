#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <string_view>

namespace gdt {

/// The one generator family used everywhere. Always seeded explicitly.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of run `rep` at one sweep point. Depends only on its arguments, so
/// sweep order and scheduling never change a run.
inline std::uint64_t stable_hash(std::uint64_t master, std::string_view kind, double sweep_value,
                                 std::uint64_t rep) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the kind
    for (unsigned char c : kind) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ h);
    s = splitmix64(s ^ std::bit_cast<std::uint64_t>(sweep_value));
    return splitmix64(s ^ rep);
}

/// Independent stream derived from a seed and a small tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace gdt
