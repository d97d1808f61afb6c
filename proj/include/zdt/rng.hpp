#pragma once

#include <cstdint>
#include <string_view>

namespace zdt {

// Derives an independent stream seed from a base seed and a stream tag, so
// every stochastic component gets its own reproducible rng.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (unsigned char c : stream) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = seed ^ h;
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace zdt
