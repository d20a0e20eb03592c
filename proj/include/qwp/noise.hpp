#pragma once

// Reproducible Gaussian noise. Uniforms come from SplitMix64 evaluated in
// counter mode (state = seed + (i + 1) * 0x9E3779B97F4A7C15), so sample i
// never depends on the evaluation order. Normals use the Box-Muller pair
// (u_{2p}, u_{2p+1}) -> (z_{2p}, z_{2p+1}).

#include "qwp/grid.hpp"

#include <cstdint>

namespace qwp {

inline constexpr const char* kNoiseGenerator = "splitmix64-ctr/box-muller";
inline constexpr int kNoiseGeneratorVersion = 1;

std::uint64_t splitmix64(std::uint64_t state);

/// Uniform in (0, 1] from counter i.
double counter_uniform(std::uint64_t seed, std::uint64_t i);

/// Standard normal sample i of the stream.
double counter_normal(std::uint64_t seed, std::uint64_t i);

/// x + sigma * G, unclipped. Pixel k (row-major) takes sample k.
ImageGrid add_gaussian_noise(const ImageGrid& x, double sigma, std::uint64_t seed);

}  // namespace qwp
