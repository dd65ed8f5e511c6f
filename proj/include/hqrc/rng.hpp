#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hqrc {

/// All randomness flows through seeds derived here; no module reads ambient
/// entropy. Child seeds come from a master seed and a string label so trial
/// order never matters.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Deterministic engine used across the project.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng, double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(rng);
}

}  // namespace hqrc
