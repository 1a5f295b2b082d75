#ifndef RESLAB_RNG_HPP
#define RESLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace reslab {

// splitmix64 output for stream position k of a given seed.  Used to give
// every Monte Carlo trial its own decorrelated engine so that parallel and
// serial execution draw identical numbers.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t x = seed + (k + 1) * 0x9e3779b97f4a7c15ULL;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::mt19937_64 make_trial_engine(std::uint64_t seed,
                                         std::uint64_t trial) {
    return std::mt19937_64(splitmix64_at(seed, trial));
}

}  // namespace reslab

#endif
