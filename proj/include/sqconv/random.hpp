#pragma once

#include <cstdint>
#include <random>

#include "sqconv/types.hpp"

namespace sqconv {

// All randomness goes through this generator, seeded from --seed.
using Rng = std::mt19937_64;

/// Uniform on [lo, hi) from the top 53 bits; unlike the standard
/// distributions the sequence is identical on every platform.
inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random state of a representation: entries in [-scale, scale]; polar radii
/// in [0.1, scale] and angles in [-pi, pi).
VectorXd random_state(Representation rep, Rng& rng, double scale = 2.0);

}  // namespace sqconv
