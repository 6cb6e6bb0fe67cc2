#include "pdsq/random.hpp"

#include <algorithm>
#include <unordered_map>

#include "pdsq/error.hpp"

namespace pdsq {

std::vector<Vertex> sample_k_subset_unsorted(std::uint32_t n, std::uint32_t k, Rng& rng) {
  if (k > n) fail(ErrorKind::parameter, "cannot sample a subset larger than the ground set");
  std::vector<Vertex> out;
  out.reserve(k);
  if (k == 0) return out;
  // Dense table when it is cheap, sparse swap map otherwise. Both realise the
  // same partial Fisher-Yates sequence for a given rng state.
  if (n <= 4 * static_cast<std::uint64_t>(k) || n <= 4096) {
    std::vector<Vertex> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
      std::swap(perm[i], perm[pick(rng)]);
      out.push_back(perm[i]);
    }
    return out;
  }
  std::unordered_map<Vertex, Vertex> swapped;
  swapped.reserve(2 * k);
  auto at = [&](Vertex idx) {
    auto it = swapped.find(idx);
    return it == swapped.end() ? idx : it->second;
  };
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
    const Vertex j = pick(rng);
    const Vertex vi = at(i);
    const Vertex vj = at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(vj);
  }
  return out;
}

std::vector<Vertex> sample_k_subset(std::uint32_t n, std::uint32_t k, Rng& rng) {
  auto out = sample_k_subset_unsorted(n, k, rng);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t sample_hypergeometric(std::uint32_t population, std::uint32_t marked,
                                    std::uint32_t draws, Rng& rng) {
  if (marked > population || draws > population) {
    fail(ErrorKind::parameter, "hypergeometric parameters exceed the population");
  }
  // Sequential urn: exact, O(draws).
  std::uint32_t remaining = population;
  std::uint32_t remaining_marked = marked;
  std::uint32_t hits = 0;
  for (std::uint32_t d = 0; d < draws && remaining_marked > 0; ++d) {
    std::uniform_int_distribution<std::uint32_t> pick(0, remaining - 1);
    if (pick(rng) < remaining_marked) {
      ++hits;
      --remaining_marked;
    }
    --remaining;
  }
  return hits;
}

}  // namespace pdsq
