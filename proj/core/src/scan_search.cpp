#include "pdsq/scan_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pdsq/error.hpp"
#include "pdsq/random.hpp"

namespace pdsq {

double binomial_coefficient(std::uint32_t m, std::uint32_t r) {
  if (r > m) return 0.0;
  r = std::min(r, m - r);
  double c = 1.0;
  for (std::uint32_t i = 1; i <= r; ++i) c = c * (m - r + i) / i;
  return std::round(c);
}

double subset_weight(const SymmetricMatrix& w, std::span<const std::uint32_t> subset) {
  double total = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) total += w.at(subset[a], subset[b]);
  return total;
}

namespace {

class ExactSearch {
 public:
  ExactSearch(const SymmetricMatrix& w, std::uint32_t r) : w_(w), r_(r) {
    max_entry_ = -std::numeric_limits<double>::infinity();
    for (std::uint32_t a = 0; a < w.size(); ++a)
      for (std::uint32_t b = a + 1; b < w.size(); ++b) max_entry_ = std::max(max_entry_, w.at(a, b));
    ceiling_ = static_cast<double>(r) * (r - 1) / 2.0 * max_entry_;
    chosen_.reserve(r);
  }

  SubsetSearchResult run() {
    best_.value = -std::numeric_limits<double>::infinity();
    descend(0, 0.0);
    std::sort(best_.subset.begin(), best_.subset.end());
    return best_;
  }

 private:
  // Upper bound on what the current partial subset can still reach.
  double bound(double current) const {
    const double left = static_cast<double>(r_ - chosen_.size());
    const double added_pairs = left * static_cast<double>(chosen_.size()) + left * (left - 1) / 2.0;
    return current + added_pairs * max_entry_;
  }

  void descend(std::uint32_t start, double current) {
    if (done_) return;
    if (chosen_.size() == r_) {
      if (current > best_.value) {
        best_.value = current;
        best_.subset = chosen_;
        if (current >= ceiling_) done_ = true;
      }
      return;
    }
    const std::uint32_t need = r_ - static_cast<std::uint32_t>(chosen_.size());
    for (std::uint32_t v = start; v + need <= w_.size(); ++v) {
      if (bound(current) <= best_.value) return;
      double gain = 0.0;
      for (std::uint32_t u : chosen_) gain += w_.at(u, v);
      chosen_.push_back(v);
      descend(v + 1, current + gain);
      chosen_.pop_back();
      if (done_) return;
    }
  }

  const SymmetricMatrix& w_;
  std::uint32_t r_;
  double max_entry_ = 0.0;
  double ceiling_ = 0.0;
  bool done_ = false;
  std::vector<std::uint32_t> chosen_;
  SubsetSearchResult best_;
};

void check_subset_size(const SymmetricMatrix& w, std::uint32_t r) {
  if (r < 2 || r > w.size()) fail(ErrorKind::infeasible_config, "subset size must satisfy 2 <= r <= sample size");
}

}  // namespace

SubsetSearchResult densest_subset_exact(const SymmetricMatrix& w, std::uint32_t r) {
  check_subset_size(w, r);
  return ExactSearch(w, r).run();
}

SubsetSearchResult densest_subset_local_search(const SymmetricMatrix& w, std::uint32_t r,
                                               std::uint32_t restarts, std::uint64_t seed) {
  check_subset_size(w, r);
  const std::uint32_t m = w.size();
  Rng rng(seed);
  SubsetSearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  best.approximate = true;

  std::vector<double> weighted_degree(m, 0.0);
  for (std::uint32_t a = 0; a < m; ++a)
    for (std::uint32_t b = 0; b < m; ++b)
      if (a != b) weighted_degree[a] += w.at(a, b);

  std::vector<char> inside(m);
  std::vector<double> link(m);  // sum of weights from each row into the current subset
  for (std::uint32_t restart = 0; restart < std::max<std::uint32_t>(restarts, 1); ++restart) {
    std::vector<std::uint32_t> members;
    if (restart == 0) {
      std::vector<std::uint32_t> order(m);
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(),
                       [&](auto a, auto b) { return weighted_degree[a] > weighted_degree[b]; });
      members.assign(order.begin(), order.begin() + r);
    } else {
      members = sample_k_subset(m, r, rng);
    }
    std::fill(inside.begin(), inside.end(), 0);
    for (auto v : members) inside[v] = 1;
    for (std::uint32_t x = 0; x < m; ++x) {
      link[x] = 0.0;
      for (auto v : members)
        if (v != x) link[x] += w.at(v, x);
    }
    // Best-improvement swaps until no swap gains.
    for (;;) {
      double best_gain = 1e-12;
      std::size_t out_idx = 0;
      std::uint32_t in_vertex = 0;
      bool found = false;
      for (std::size_t i = 0; i < members.size(); ++i) {
        const std::uint32_t v = members[i];
        for (std::uint32_t x = 0; x < m; ++x) {
          if (inside[x]) continue;
          const double gain = link[x] - w.at(v, x) - link[v];
          if (gain > best_gain) {
            best_gain = gain;
            out_idx = i;
            in_vertex = x;
            found = true;
          }
        }
      }
      if (!found) break;
      const std::uint32_t v = members[out_idx];
      members[out_idx] = in_vertex;
      inside[v] = 0;
      inside[in_vertex] = 1;
      for (std::uint32_t x = 0; x < m; ++x) {
        if (x != v) link[x] -= w.at(v, x);
        if (x != in_vertex) link[x] += w.at(in_vertex, x);
      }
    }
    std::sort(members.begin(), members.end());
    const double value = subset_weight(w, members);
    if (value > best.value) {
      best.value = value;
      best.subset = std::move(members);
    }
  }
  return best;
}

}  // namespace pdsq
