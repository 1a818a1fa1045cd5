#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bandit {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed from a parent seed and a stream index.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t stream) noexcept
{
    return splitmix64(parent ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

template <typename Scalar = double>
Scalar uniform01(Rng& rng)
{
    return std::uniform_real_distribution<Scalar>(Scalar(0), Scalar(1))(rng);
}

inline std::size_t uniform_index(std::size_t n, Rng& rng)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Index of a maximal element, ties broken uniformly at random.
/// Consumes one draw only when more than one maximizer exists.
template <typename Range>
std::size_t argmax_random_tie(const Range& values, Rng& rng)
{
    std::size_t best = 0;
    std::size_t ties = 0;
    const auto n = static_cast<std::size_t>(values.size());
    for (std::size_t i = 1; i < n; ++i) {
        if (values[i] > values[best]) {
            best = i;
            ties = 0;
        } else if (values[i] == values[best]) {
            ++ties;
        }
    }
    if (ties == 0) return best;
    std::size_t pick = uniform_index(ties + 1, rng);
    for (std::size_t i = best; i < n; ++i) {
        if (values[i] == values[best]) {
            if (pick == 0) return i;
            --pick;
        }
    }
    return best;
}

}  // namespace bandit
