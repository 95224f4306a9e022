#pragma once

#include <cstdint>
#include <random>

namespace scsr {

using Rng = std::mt19937_64;

/// Independent stream for a sub-task (run repetition, audit chunk, individual).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept
{
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <typename T>
T uniform_int(Rng& rng, T lo, T hi)
{
    return std::uniform_int_distribution<T>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng)
{
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

} // namespace scsr
