#pragma once

#include "gmreg/linalg.hpp"

#include <cstdint>

namespace gmreg {

// Deterministic seeded Gaussian sampler: mt19937_64 feeding an explicit
// Box-Muller transform (uniforms taken as the top 53 bits of each draw).
// Same seed, same length: bit-identical output on any platform.
Vector gaussian_vector(Index len, double sigma, std::uint64_t seed);

// Uniform draws in [lo, hi), same generator contract.
Vector uniform_vector(Index len, double lo, double hi, std::uint64_t seed);

}  // namespace gmreg
