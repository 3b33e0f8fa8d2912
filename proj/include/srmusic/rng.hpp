#ifndef SRMUSIC_RNG_HPP
#define SRMUSIC_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace srmusic
{

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for a sub-stream identified by (base, coordinates...). Streams for
/// distinct coordinates are independent of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) noexcept
{
    std::uint64_t h = mix64(base);
    for (auto c : coords) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

} // namespace srmusic

#endif // SRMUSIC_RNG_HPP
