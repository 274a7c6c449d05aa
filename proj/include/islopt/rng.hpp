#pragma once

#include <cstdint>
#include <random>

namespace islopt {

// Every seeded component draws from a 64-bit Mersenne Twister. Results are
// reproducible for a given seed and standard library build.
using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) { return Rng(seed); }

// Uniform integer in [0, n).
inline int uniform_index(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

}  // namespace islopt
