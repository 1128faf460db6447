#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lcaudit {

using Rng = std::mt19937_64;

// Named seed derivation: every random stream in an audit descends from one
// root seed through a path of labels ("privacy/ngen/500/run3"), so a
// sub-result can be regenerated without replaying unrelated streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
    // FNV-1a over the label, mixed with the parent.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return splitmix64(parent ^ splitmix64(h));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return splitmix64(parent ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace lcaudit
