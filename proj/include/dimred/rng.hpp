#pragma once

#include <cstdint>
#include <random>

namespace dimred {

/// RNG seed. Identical seeds produce identical outputs from every
/// randomized operation in the library.
struct Seed {
    std::uint64_t value = 0;
};

/// splitmix64 step; used to derive stream-independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a decorrelated seed for a named substream (e.g. per point, per
/// iteration). Chaining splitmix keeps streams independent of thread
/// scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(splitmix64(base) ^ salt);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt1, std::uint64_t salt2) {
    return derive_seed(derive_seed(base, salt1), salt2);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed ^ 0x5dee1e9b6aa5ce5fULL));
}

inline std::mt19937_64 make_engine(Seed seed) { return make_engine(seed.value); }

} // namespace dimred
