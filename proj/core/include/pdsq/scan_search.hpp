#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pdsq {

/// Dense symmetric matrix of observed entries over a vertex sample.
/// Diagonal entries are never read.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::uint32_t size) : size_(size), data_(std::size_t{size} * size, 0.0) {}

  std::uint32_t size() const noexcept { return size_; }
  double at(std::uint32_t a, std::uint32_t b) const noexcept { return data_[std::size_t{a} * size_ + b]; }
  void set(std::uint32_t a, std::uint32_t b, double v) noexcept {
    data_[std::size_t{a} * size_ + b] = v;
    data_[std::size_t{b} * size_ + a] = v;
  }

 private:
  std::uint32_t size_;
  std::vector<double> data_;
};

struct SubsetSearchResult {
  double value = 0.0;                 // sum of entries inside the best subset found
  std::vector<std::uint32_t> subset;  // row indices, sorted
  bool approximate = false;
};

/// C(m, r) as a double (exact below 2^53).
double binomial_coefficient(std::uint32_t m, std::uint32_t r);

/// max over size-r subsets L of sum_{a<b in L} w(a, b), by depth-first
/// enumeration with an admissible upper bound for pruning. Exact.
SubsetSearchResult densest_subset_exact(const SymmetricMatrix& w, std::uint32_t r);

/// Best-improvement swap ascent from `restarts` starting subsets (the first
/// is the top-r rows by weighted degree, the rest uniformly random). The
/// returned value is the weight of an actual subset, so it never exceeds the
/// exact maximum.
SubsetSearchResult densest_subset_local_search(const SymmetricMatrix& w, std::uint32_t r,
                                               std::uint32_t restarts, std::uint64_t seed);

/// Sum of w over all pairs inside `subset`.
double subset_weight(const SymmetricMatrix& w, std::span<const std::uint32_t> subset);

}  // namespace pdsq
