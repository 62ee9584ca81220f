#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace polarlab {

using Rng = std::mt19937_64;

// The helpers below avoid std::*_distribution so that streams are
// bit-identical across standard library implementations.

inline std::uint64_t splitmix64(std::uint64_t x)
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

/// Independent generator for work item `index` of a run seeded with `seed`.
inline Rng stream(std::uint64_t seed, std::uint64_t index)
{
	return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng)
{
	return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0, by rejection.
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t n)
{
	const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
	std::uint64_t r;
	do
		r = rng();
	while (r >= limit);
	return r % n;
}

} // namespace polarlab
