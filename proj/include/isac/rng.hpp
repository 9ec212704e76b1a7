// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace isac {

using RandomEngine = std::mt19937_64;

/// 64-bit FNV-1a. Stable across platforms, used for substream names and config hashes.
constexpr std::uint64_t fnv1a64(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Independent engine for the named substream of one drop.
///
/// The stream depends only on (root_seed, drop_id, name), so adding or removing
/// other consumers never shifts the draws of an existing stream.
inline RandomEngine substream(std::uint64_t root_seed, std::uint64_t drop_id, std::string_view name) {
    const std::uint64_t tag = fnv1a64(name);
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(drop_id), static_cast<std::uint32_t>(drop_id >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
    return RandomEngine(seq);
}

/// Uniform phase in (-pi, pi].
inline double uniform_phase(RandomEngine& rng) {
    constexpr double pi = 3.14159265358979323846;
    // uniform_real_distribution yields [a, b); negate to land in (-pi, pi].
    return -std::uniform_real_distribution<double>(-pi, pi)(rng);
}

inline double standard_normal(RandomEngine& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform01_open(RandomEngine& rng) {
    // (0, 1): the delay draw takes a logarithm.
    double u = 0.0;
    while (u == 0.0)
        u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return u;
}

} // namespace isac
