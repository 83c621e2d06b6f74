#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bandchol {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/**
 * Seed of the substream identified by a path of counters below a master
 * seed. Streams depend only on (master, path), never on which thread
 * consumes them.
 */
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t c : path) s = mix64(s ^ mix64(c + 0x632BE59BD9B4E019ull));
    return s;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace bandchol
