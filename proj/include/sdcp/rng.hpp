#pragma once

#include <cstdint>
#include <random>

namespace sdcp {

// Every random draw in the library goes through an explicit engine handle so
// that a (config, seed) pair fully determines a run.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace sdcp
