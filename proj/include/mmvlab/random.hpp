#pragma once

#include <cstdint>
#include <random>

namespace mmvlab {

// Portable draws from mt19937_64: the standard distributions are not
// specified bit-for-bit, these are.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace mmvlab
