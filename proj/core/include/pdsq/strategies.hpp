#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

#include "pdsq/oracle.hpp"
#include "pdsq/random.hpp"
#include "pdsq/types.hpp"

namespace pdsq {

/// A non-adaptive query plan: every pair is fixed before any answer exists.
/// Pairs are unique as unordered pairs.
struct QueryPlan {
  std::vector<VertexPair> pairs;
  /// Budget as the originating construction counts it (may exceed pairs.size()
  /// when the construction has overlapping pairs, e.g. the bipartite pattern).
  std::uint64_t nominal_budget = 0;

  std::uint64_t size() const noexcept { return pairs.size(); }
};

/// All pairs inside a uniformly drawn M-subset.
struct CliquePattern {
  std::vector<Vertex> sample;  // sorted
  QueryPlan plan;
};

/// Every probe against every panel vertex. probes is a subset of panel.
struct BipartitePattern {
  std::vector<Vertex> panel;   // sorted
  std::vector<Vertex> probes;  // sorted
  QueryPlan plan;
};

/// Q distinct pairs drawn uniformly without replacement. Throws budget_too_large
/// when Q > C(n, 2).
QueryPlan uniform_plan(std::uint32_t n, std::uint64_t Q, std::uint64_t seed);

CliquePattern clique_pattern_plan(std::uint32_t n, std::uint32_t M, std::uint64_t seed);

BipartitePattern bipartite_pattern_plan(std::uint32_t n, std::uint32_t n_prime, std::uint32_t M,
                                        std::uint64_t seed);

/// Unique unordered pairs in a bipartite pattern: M*n' - M - C(M, 2).
std::uint64_t bipartite_unique_pairs(std::uint32_t n_prime, std::uint32_t M);

/// Issues every pair of the plan in order and returns the answers in the same order.
std::vector<double> execute(const QueryPlan& plan, QueryOracle& oracle);

/// CSV rows in the query-log layout (trial_id,step,i,j,answer,cumulative_unique);
/// the answer column is left empty because a plan has not been answered yet.
void write_plan_csv(std::ostream& os, std::uint64_t trial_id, const QueryPlan& plan);

/// Next-pair rule that may look at previous answers.
class AdaptiveRule {
 public:
  virtual ~AdaptiveRule() = default;
  /// nullopt once the rule is done (budget reached or nothing left to ask).
  virtual std::optional<VertexPair> next() = 0;
  virtual void observe(VertexPair pair, double answer) = 0;
};

/// Runs the rule against the oracle until it stops. Returns the number of pairs issued.
std::uint64_t execute(AdaptiveRule& rule, QueryOracle& oracle);

/// Uniform sampling of pairs not yet seen, without replacement.
class FreshPairSampler {
 public:
  FreshPairSampler(std::uint32_t n, Rng& rng) : n_(n), rng_(rng) {}

  /// nullopt when every pair has been taken.
  std::optional<VertexPair> draw();
  /// Marks a pair as taken without drawing it.
  void mark(VertexPair pair) { taken_.insert(pair.key()); }
  bool taken(VertexPair pair) const { return taken_.contains(pair.key()); }
  std::uint64_t taken_count() const { return taken_.size(); }

 private:
  std::uint32_t n_;
  Rng& rng_;
  std::unordered_set<std::uint64_t> taken_;
};

/// Score-following adaptive rule. A vertex scores the sum of its answers minus
/// baseline_rate times its queried degree. While some vertex scores above zero,
/// the rule asks unexplored pairs among the `fanout` best-scoring vertices, then
/// pairs among their above-baseline neighbours; otherwise it explores a
/// uniformly random fresh pair. Ties in score go to the lower vertex index.
class GreedyAdaptiveRule final : public AdaptiveRule {
 public:
  GreedyAdaptiveRule(std::uint32_t n, std::uint64_t Q, std::uint32_t fanout, double baseline_rate,
                     std::uint64_t seed);

  std::optional<VertexPair> next() override;
  void observe(VertexPair pair, double answer) override;

  std::uint64_t issued() const noexcept { return issued_; }

 private:
  double score(Vertex v) const;
  void rescore(Vertex v, double delta_pos, double delta_deg);
  std::optional<VertexPair> focused_pair();

  std::uint32_t n_;
  std::uint64_t budget_;
  std::uint32_t fanout_;
  double baseline_;
  Rng rng_;
  FreshPairSampler sampler_;
  std::uint64_t issued_ = 0;
  std::vector<double> positives_;
  std::vector<double> degree_;
  std::vector<std::vector<Vertex>> positive_neighbours_;
  std::set<std::pair<double, Vertex>> ranking_;  // (-score, v)
};

}  // namespace pdsq
