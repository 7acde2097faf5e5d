#pragma once

#include <cstdint>

namespace ovfit {

// All randomness in the project flows through splitmix64. Serialized models,
// synthetic datasets, and dataset splits depend on these exact bit patterns,
// so the functions here must never change; golden vectors pin them in tests.

/// One splitmix64 step applied to a fixed state. Used as a 64-bit mixer for
/// seed and stream derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent child seed for stream `stream` of `seed`. Per-tree and
/// per-record generators are derived this way, so results do not depend on
/// the order in which streams are consumed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream));
}

/// splitmix64 sequence generator.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Plain modulo: the bias is irrelevant at
    /// the bounds used here and a fixed one-draw cost keeps streams aligned.
    std::uint64_t next_below(std::uint64_t bound) noexcept { return next() % bound; }

private:
    std::uint64_t state_;
};

}  // namespace ovfit
