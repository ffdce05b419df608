// Seeded random streams. Every consumer derives its own stream from
// (base seed, stream labels) so draws never leak between consumers.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace relaysim {

using Rng = std::mt19937_64;

// Stream labels keep purposes apart when they share a seed.
enum class Stream : uint64_t {
    Topology = 1,
    Adversary = 2,
    Workload = 3,
    Protocol = 4,
    Observer = 5,
    Dandelion = 6,
};

inline Rng make_rng(uint64_t seed, std::initializer_list<uint64_t> labels) {
    std::vector<uint32_t> words;
    words.reserve(2 * (labels.size() + 1));
    auto push = [&](uint64_t v) {
        words.push_back(static_cast<uint32_t>(v));
        words.push_back(static_cast<uint32_t>(v >> 32));
    };
    push(seed);
    for (uint64_t l : labels) push(l);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline Rng make_rng(uint64_t seed, Stream stream, uint64_t index = 0) {
    return make_rng(seed, {static_cast<uint64_t>(stream), index});
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline size_t uniform_index(Rng& rng, size_t n) {
    return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

// splitmix64 finalizer; used where a stateless keyed draw is needed.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace relaysim
