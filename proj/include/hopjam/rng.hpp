#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hopjam {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a hash of a stage tag, used to name seed streams.
std::uint64_t tag_hash(std::string_view tag);

/// Counter-based child seed: derive_seed(s, i) for i = 0, 1, 2, ... yields
/// independent streams.  Every randomized stage of the toolkit takes its seed
/// from the master seed through this function.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

/// Named child seed: derive_seed(seed, tag_hash(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace hopjam
