#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace demix::rng {

using Engine = std::mt19937_64;

// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix(std::uint64_t x);

// Derives an independent substream seed from a master seed and a tag.
// Tag bytes and integer arguments are folded in with FNV-1a, then the
// result is passed through mix(). Every seeded object in the library
// names its substream this way, so adding new consumers of randomness
// never perturbs existing streams.
std::uint64_t derive(std::uint64_t seed, std::string_view tag);
std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t a);
std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                     std::uint64_t b);

Engine make_engine(std::uint64_t seed);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Engine& eng);
double uniform(Engine& eng, double lo, double hi);

// Standard normal via Box-Muller; consumes exactly two words per call.
double normal(Engine& eng);

// Uniform integer on [lo, hi], rejection-sampled so the law is exact.
std::int64_t uniform_int(Engine& eng, std::int64_t lo, std::int64_t hi);

// k distinct values from {0, ..., n-1}, returned ascending.
std::vector<int> sample_indices(Engine& eng, int n, int k);

}  // namespace demix::rng
