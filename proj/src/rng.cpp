#include "demix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace demix::rng {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv_u64(std::uint64_t h, std::uint64_t v) {
  return fnv_bytes(h, &v, sizeof(v));
}

}  // namespace

std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = fnv_u64(kFnvOffset, seed);
  h = fnv_bytes(h, tag.data(), tag.size());
  return mix(h);
}

std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t a) {
  std::uint64_t h = fnv_u64(kFnvOffset, seed);
  h = fnv_bytes(h, tag.data(), tag.size());
  h = fnv_u64(h, a);
  return mix(h);
}

std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                     std::uint64_t b) {
  std::uint64_t h = fnv_u64(kFnvOffset, seed);
  h = fnv_bytes(h, tag.data(), tag.size());
  h = fnv_u64(h, a);
  h = fnv_u64(h, b);
  return mix(h);
}

Engine make_engine(std::uint64_t seed) { return Engine(seed); }

double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

double normal(Engine& eng) {
  // (0, 1] for the log argument, [0, 1) for the angle.
  double u1 = static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t uniform_int(Engine& eng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(eng());  // full 64-bit span
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % range);
}

std::vector<int> sample_indices(Engine& eng, int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_indices: k out of range");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates: the first k slots end up as the sample.
  for (int i = 0; i < k; ++i) {
    int j = static_cast<int>(uniform_int(eng, i, n - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace demix::rng
