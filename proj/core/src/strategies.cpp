#include "pdsq/strategies.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <unordered_set>

#include "pdsq/divergences.hpp"
#include "pdsq/error.hpp"

namespace pdsq {

std::optional<VertexPair> FreshPairSampler::draw() {
  const std::uint64_t total = binom2(n_);
  if (taken_.size() >= total) return std::nullopt;
  std::uniform_int_distribution<std::uint32_t> first(0, n_ - 1);
  std::uniform_int_distribution<std::uint32_t> second(0, n_ - 2);
  // Rejection is fine while at most half the pairs are taken; past that,
  // pick uniformly among the remaining pairs by rank.
  if (taken_.size() * 2 <= total) {
    for (;;) {
      const Vertex i = first(rng_);
      Vertex j = second(rng_);
      if (j >= i) ++j;
      const VertexPair p = VertexPair::of(i, j);
      if (taken_.insert(p.key()).second) return p;
    }
  }
  std::uniform_int_distribution<std::uint64_t> rank_dist(0, total - taken_.size() - 1);
  std::uint64_t rank = rank_dist(rng_);
  for (Vertex lo = 0; lo + 1 < n_; ++lo) {
    for (Vertex hi = lo + 1; hi < n_; ++hi) {
      const VertexPair p{lo, hi};
      if (taken_.contains(p.key())) continue;
      if (rank-- == 0) {
        taken_.insert(p.key());
        return p;
      }
    }
  }
  return std::nullopt;  // unreachable
}

QueryPlan uniform_plan(std::uint32_t n, std::uint64_t Q, std::uint64_t seed) {
  const std::uint64_t total = binom2(n);
  if (Q > total) {
    fail(ErrorKind::budget_too_large,
         "uniform plan asks for " + std::to_string(Q) + " pairs but only " + std::to_string(total) + " exist");
  }
  QueryPlan plan;
  plan.nominal_budget = Q;
  plan.pairs.reserve(Q);
  Rng rng(seed);
  if (Q * 2 > total) {
    std::vector<VertexPair> all;
    all.reserve(total);
    for (Vertex lo = 0; lo + 1 < n; ++lo)
      for (Vertex hi = lo + 1; hi < n; ++hi) all.push_back({lo, hi});
    for (std::uint64_t i = 0; i < Q; ++i) {
      std::uniform_int_distribution<std::uint64_t> pick(i, total - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    all.resize(Q);
    plan.pairs = std::move(all);
    return plan;
  }
  FreshPairSampler sampler(n, rng);
  for (std::uint64_t i = 0; i < Q; ++i) plan.pairs.push_back(*sampler.draw());
  return plan;
}

CliquePattern clique_pattern_plan(std::uint32_t n, std::uint32_t M, std::uint64_t seed) {
  if (M > n) fail(ErrorKind::parameter, "clique pattern needs M <= n");
  CliquePattern out;
  Rng rng(seed);
  out.sample = sample_k_subset(n, M, rng);
  out.plan.nominal_budget = binom2(M);
  out.plan.pairs.reserve(binom2(M));
  for (std::size_t a = 0; a < out.sample.size(); ++a)
    for (std::size_t b = a + 1; b < out.sample.size(); ++b)
      out.plan.pairs.push_back({out.sample[a], out.sample[b]});
  return out;
}

std::uint64_t bipartite_unique_pairs(std::uint32_t n_prime, std::uint32_t M) {
  return static_cast<std::uint64_t>(M) * n_prime - M - binom2(M);
}

BipartitePattern bipartite_pattern_plan(std::uint32_t n, std::uint32_t n_prime, std::uint32_t M,
                                        std::uint64_t seed) {
  if (!(M <= n_prime && n_prime <= n)) fail(ErrorKind::parameter, "bipartite pattern needs M <= n' <= n");
  BipartitePattern out;
  Rng rng(seed);
  out.panel = sample_k_subset(n, n_prime, rng);
  // Probes are drawn by position inside the panel.
  auto positions = sample_k_subset(n_prime, M, rng);
  out.probes.reserve(M);
  for (Vertex pos : positions) out.probes.push_back(out.panel[pos]);

  // Probe-probe pairs appear twice in M x S; keep the one issued first.
  std::vector<bool> is_probe(n_prime, false);
  for (Vertex pos : positions) is_probe[pos] = true;
  out.plan.nominal_budget = static_cast<std::uint64_t>(M) * n_prime;
  out.plan.pairs.reserve(bipartite_unique_pairs(n_prime, M));
  std::vector<bool> done_probe(n_prime, false);
  for (Vertex ppos : positions) {
    const Vertex i = out.panel[ppos];
    for (Vertex spos = 0; spos < n_prime; ++spos) {
      if (spos == ppos) continue;
      if (is_probe[spos] && done_probe[spos]) continue;
      out.plan.pairs.push_back(VertexPair::of(i, out.panel[spos]));
    }
    done_probe[ppos] = true;
  }
  return out;
}

std::vector<double> execute(const QueryPlan& plan, QueryOracle& oracle) {
  std::vector<double> answers;
  answers.reserve(plan.pairs.size());
  for (const auto& p : plan.pairs) answers.push_back(oracle.query(p.lo, p.hi));
  return answers;
}

void write_plan_csv(std::ostream& os, std::uint64_t trial_id, const QueryPlan& plan) {
  std::uint64_t step = 0;
  for (const auto& p : plan.pairs) {
    os << trial_id << ',' << step << ',' << p.lo << ',' << p.hi << ",," << (step + 1) << '\n';
    ++step;
  }
}

std::uint64_t execute(AdaptiveRule& rule, QueryOracle& oracle) {
  std::uint64_t issued = 0;
  while (auto pair = rule.next()) {
    const double answer = oracle.query(pair->lo, pair->hi);
    rule.observe(*pair, answer);
    ++issued;
  }
  return issued;
}

GreedyAdaptiveRule::GreedyAdaptiveRule(std::uint32_t n, std::uint64_t Q, std::uint32_t fanout,
                                       double baseline_rate, std::uint64_t seed)
    : n_(n),
      budget_(Q),
      fanout_(fanout),
      baseline_(baseline_rate),
      rng_(seed),
      sampler_(n, rng_),
      positives_(n, 0.0),
      degree_(n, 0.0),
      positive_neighbours_(n) {
  if (n < 2) fail(ErrorKind::parameter, "adaptive rule needs n >= 2");
  if (fanout == 0 || Q < fanout) fail(ErrorKind::parameter, "adaptive rule needs 1 <= fanout <= Q");
  if (Q > binom2(n)) fail(ErrorKind::budget_too_large, "adaptive rule budget exceeds C(n, 2)");
}

double GreedyAdaptiveRule::score(Vertex v) const { return positives_[v] - baseline_ * degree_[v]; }

void GreedyAdaptiveRule::rescore(Vertex v, double delta_pos, double delta_deg) {
  const double before = score(v);
  if (before > 0.0) ranking_.erase({-before, v});
  positives_[v] += delta_pos;
  degree_[v] += delta_deg;
  const double after = score(v);
  if (after > 0.0) ranking_.insert({-after, v});
}

std::optional<VertexPair> GreedyAdaptiveRule::focused_pair() {
  std::vector<Vertex> top;
  top.reserve(fanout_);
  for (auto it = ranking_.begin(); it != ranking_.end() && top.size() < fanout_; ++it) {
    top.push_back(it->second);
  }
  if (top.empty()) return std::nullopt;

  for (std::size_t a = 0; a < top.size(); ++a) {
    for (std::size_t b = a + 1; b < top.size(); ++b) {
      const VertexPair p = VertexPair::of(top[a], top[b]);
      if (!sampler_.taken(p)) return p;
    }
  }
  for (Vertex v : top) {
    const auto& nb = positive_neighbours_[v];
    if (nb.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
    for (std::uint32_t attempt = 0; attempt < fanout_; ++attempt) {
      const Vertex a = nb[pick(rng_)];
      const Vertex b = nb[pick(rng_)];
      if (a == b) continue;
      const VertexPair p = VertexPair::of(a, b);
      if (!sampler_.taken(p)) return p;
    }
  }
  return std::nullopt;
}

std::optional<VertexPair> GreedyAdaptiveRule::next() {
  if (issued_ >= budget_) return std::nullopt;
  std::optional<VertexPair> p = focused_pair();
  if (p) {
    sampler_.mark(*p);
  } else {
    p = sampler_.draw();
    if (!p) return std::nullopt;
  }
  ++issued_;
  return p;
}

void GreedyAdaptiveRule::observe(VertexPair pair, double answer) {
  rescore(pair.lo, answer, 1.0);
  rescore(pair.hi, answer, 1.0);
  if (answer > baseline_) {
    positive_neighbours_[pair.lo].push_back(pair.hi);
    positive_neighbours_[pair.hi].push_back(pair.lo);
  }
}

}  // namespace pdsq
