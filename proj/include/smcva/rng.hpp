#pragma once

#include <cstdint>
#include <random>

namespace smcva {

// splitmix64 finalizer, used to derive decorrelated stream seeds from a
// master seed plus stage/worker tags.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 seed_stream(std::uint64_t master, std::uint64_t tag0,
                                   std::uint64_t tag1 = 0) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ mix64(tag0 + 0x517cc1b727220a95ULL));
    s = mix64(s ^ mix64(tag1 + 0x2545f4914f6cdd1dULL));
    return std::mt19937_64(s);
}

// Stage tags for per-stream seed derivation.
enum StreamTag : std::uint64_t {
    kStreamTruth = 1,
    kStreamNoise = 2,
    kStreamAnnealInit = 3,
    kStreamWalker = 4,
};

}  // namespace smcva
