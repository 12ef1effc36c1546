#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace oiekit::rng {

// All randomness flows through std::mt19937_64 (whose output sequence is
// pinned by the standard) plus the explicit mappings below, so a given seed
// produces the same results on every platform.

inline double unit_double(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Draws an index proportionally to `weights` (non-negative, summing to
// `total`). Zero-weight entries are never returned.
inline std::size_t weighted_index(const std::vector<double>& weights, double total,
                                  std::mt19937_64& gen) {
  double u = unit_double(gen) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc && weights[i] > 0.0) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

// k distinct indices from [0, n), uniform without replacement, in draw order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               std::mt19937_64& gen) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(unit_double(gen) * static_cast<double>(n - i));
    if (j >= n) j = n - 1;
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr std::uint64_t mix(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from the single pipeline seed. Streams
// are keyed by purpose ("select", "mask", "cluster-init", "train-sample"),
// an optional record id, and an optional index, so each command can be
// re-run in isolation without disturbing the others.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                 std::string_view id = {}, std::uint64_t index = 0) {
  std::uint64_t h = mix(base);
  h = mix(h ^ fnv1a(purpose));
  if (!id.empty()) h = mix(h ^ fnv1a(id));
  return mix(h ^ index);
}

}  // namespace oiekit::rng
