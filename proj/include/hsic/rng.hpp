#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace hsic {

using Rng = std::mt19937_64;

/// Stateless 64-bit mix; used for counter-based draws keyed on (seed, index).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ splitmix64(value));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Derives an independent stream seed from a base seed and a tag.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(hash_combine(seed, stream)); }

/// Uniform integer in [0, n) without modulo bias. Independent of the
/// standard library's distribution implementation.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

/// Standard normal draw (Box-Muller on two uniform draws).
inline double standard_normal(Rng& rng) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    double u1 = unit_double(rng());
    while (u1 <= 0.0) u1 = unit_double(rng());
    const double u2 = unit_double(rng());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Fisher-Yates shuffle on top of uniform_index.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace hsic
