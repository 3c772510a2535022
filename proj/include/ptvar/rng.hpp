#pragma once

#include <cstdint>
#include <random>

namespace ptvar {

/// splitmix64 finalizer; a bijective 64-bit mixer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for replication `index` under `master`. Depends only on the pair, so
/// any schedule of replications sees the same streams.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

[[nodiscard]] inline Engine make_engine(std::uint64_t seed) {
    return Engine(mix64(seed));
}

} // namespace ptvar
