#pragma once

#include <cstdint>
#include <random>

namespace rpde {

inline constexpr std::uint64_t kDefaultSeed = 20260415;

// SplitMix64 step: advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for the independent stream `index` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
double uniform_open(std::mt19937_64& rng);

// Standard normal quantile: Acklam's rational approximation followed by one
// Halley step against erfc. Requires 0 < p < 1.
double inverse_normal_cdf(double p);

double standard_normal(std::mt19937_64& rng);

}  // namespace rpde
