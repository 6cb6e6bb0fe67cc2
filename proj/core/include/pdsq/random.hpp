#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "pdsq/types.hpp"

namespace pdsq {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Keyed derivation of a child seed from a parent seed and a tag path.
/// Changing any component changes the result.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(base ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x3c6ef372fe94f82bULL));
  return h;
}

/// Maps a 64-bit word to the open interval (0, 1) using its top 53 bits.
constexpr double to_open_unit(std::uint64_t x) noexcept {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Stream tags used for seed derivation. Values are part of the reproducibility
// contract; do not renumber.
namespace stream {
inline constexpr std::uint64_t planted_set = 1;
inline constexpr std::uint64_t edges = 2;
inline constexpr std::uint64_t instance = 3;
inline constexpr std::uint64_t strategy = 4;
inline constexpr std::uint64_t decision = 5;
inline constexpr std::uint64_t detector = 6;
inline constexpr std::uint64_t overlap = 7;
}  // namespace stream

/// Uniform k-subset of [0, n), returned sorted. Partial Fisher-Yates over a
/// sparse swap table, so cost is O(k) regardless of n.
std::vector<Vertex> sample_k_subset(std::uint32_t n, std::uint32_t k, Rng& rng);

/// Same draw, but in the order produced by the shuffle (not sorted).
std::vector<Vertex> sample_k_subset_unsorted(std::uint32_t n, std::uint32_t k, Rng& rng);

/// Number of marked items in `draws` draws without replacement from a
/// population of `population` items of which `marked` are marked.
std::uint32_t sample_hypergeometric(std::uint32_t population, std::uint32_t marked,
                                    std::uint32_t draws, Rng& rng);

}  // namespace pdsq
