#include "pdsq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <unordered_set>

#include "pdsq/error.hpp"
#include "pdsq/parallel.hpp"
#include "pdsq/random.hpp"

namespace pdsq {

BoundReport theorem1_bounds(const BoundInputs& in) {
  const double p = in.pair.p;
  const double q = in.pair.q;
  if (!(q > 0.0 && q < 1.0)) fail(ErrorKind::domain, "q must lie in (0, 1)");
  if (!(p <= 1.0)) fail(ErrorKind::domain, "p must not exceed 1");
  if (!(p > q)) fail(ErrorKind::domain, "p must exceed q (zero divergence otherwise)");
  if (!(in.epsilon >= 0.0 && in.epsilon < 2.0)) fail(ErrorKind::domain, "epsilon must lie in [0, 2)");
  if (!(in.delta > 0.0 && in.delta <= 1.0)) fail(ErrorKind::domain, "delta must lie in (0, 1]");
  if (!(in.C > 0.0) || !(in.degree_constant > 0.0) || !(in.epsilon0 >= 0.0)) {
    fail(ErrorKind::domain, "constants must be positive");
  }
  if (in.k < 1 || in.n < 2 || in.k > in.n) fail(ErrorKind::domain, "need 1 <= k <= n and n >= 2");

  BoundReport r;
  r.inputs = in;
  r.chi2 = chi_square(in.pair);
  r.kl = kl(in.pair, in.base);
  const double n = static_cast<double>(in.n);
  const double k = static_cast<double>(in.k);
  const double ratio2 = (n * n) / (k * k);
  const double log_nk = log_in(n / k, in.base);
  const double log_n = log_in(n, in.base);
  const double chi4 = r.chi2 * r.chi2;

  r.statistical_lower_Q = (2.0 - in.epsilon) * ratio2 / chi4 * log_nk * log_nk;
  r.adaptive_lower_Q = in.delta * r.statistical_lower_Q;
  r.scan_sufficient_Q = (2.0 + in.epsilon) * ratio2 / (r.kl * r.kl) * log_nk * log_nk;
  r.scan_sufficient_Q_chi = (2.0 + in.epsilon) * in.C * ratio2 / chi4 * log_nk * log_nk;
  r.degree_sufficient_Q = in.degree_constant * (n * n * n) / (k * k * k) * log_n * log_n * log_n / r.chi2;
  r.min_k = (2.0 + in.epsilon0) * log_n / r.kl;

  const double with_logn = (2.0 - in.epsilon) * ratio2 / chi4 * log_n * log_n;
  if (std::abs(with_logn - r.statistical_lower_Q) > 0.01 * std::max(r.statistical_lower_Q, 1e-300)) {
    r.statistical_lower_Q_logn = with_logn;
  }
  return r;
}

std::string to_json(const BoundReport& r) {
  nlohmann::json j;
  j["inputs"] = {{"n", r.inputs.n},
                 {"k", r.inputs.k},
                 {"p", r.inputs.pair.p},
                 {"q", r.inputs.pair.q},
                 {"epsilon", r.inputs.epsilon},
                 {"delta", r.inputs.delta},
                 {"C", r.inputs.C},
                 {"epsilon0", r.inputs.epsilon0},
                 {"degree_constant", r.inputs.degree_constant},
                 {"log_base", std::string(to_string(r.inputs.base))}};
  j["chi2"] = r.chi2;
  j["kl"] = r.kl;
  j["statistical_lower_Q"] = r.statistical_lower_Q;
  j["adaptive_lower_Q"] = r.adaptive_lower_Q;
  j["scan_sufficient_Q"] = r.scan_sufficient_Q;
  j["scan_sufficient_Q_chi"] = r.scan_sufficient_Q_chi;
  j["degree_sufficient_Q"] = r.degree_sufficient_Q;
  j["min_k"] = r.min_k;
  if (r.statistical_lower_Q_logn) {
    j["statistical_lower_Q_logn"] = *r.statistical_lower_Q_logn;
  }
  return j.dump();
}

double lemma1_planted_bound(double Q, double n, double k, double delta, AdaptivityMode mode,
                            double chi2_prime) {
  if (!(Q >= 1.0)) fail(ErrorKind::domain, "Q must be at least 1");
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::domain, "delta must lie in (0, 1]");
  if (!(n > 0.0 && k > 0.0 && k <= n)) fail(ErrorKind::domain, "need 0 < k <= n");
  if (!(chi2_prime >= 0.0)) fail(ErrorKind::domain, "chi2_prime must be nonnegative");
  const double density = k * k / (n * n);
  if (mode == AdaptivityMode::non_adaptive) {
    return Q * density * (1.0 + (1.0 / std::sqrt(delta)) * (n / (k * std::sqrt(Q))));
  }
  return Q * density / delta * std::sqrt(1.0 + n * n / (Q * k * k)) * std::sqrt(1.0 + chi2_prime);
}

double hypergeom_tail_upper(std::uint64_t n, std::uint64_t k, std::uint64_t h) {
  if (n == 0 || k == 0 || k > n) fail(ErrorKind::domain, "need 1 <= k <= n");
  if (h > k) fail(ErrorKind::domain, "h must not exceed k");
  const double rho = static_cast<double>(k) / static_cast<double>(n);
  const double a = static_cast<double>(h) / static_cast<double>(k);
  if (a < rho * (1.0 - 1e-12)) fail(ErrorKind::domain, "bound holds only for h/k >= k/n");
  return std::exp(-static_cast<double>(k) * kl_bernoulli(std::max(a, rho), rho));
}

MonteCarloEstimate chi_square_overlap_estimate(const QueryPlan& plan, std::uint32_t n, std::uint32_t k,
                                               double chi2, std::uint64_t samples, std::uint64_t seed,
                                               unsigned threads) {
  if (k > n || k < 1) fail(ErrorKind::parameter, "need 1 <= k <= n");
  if (!(chi2 >= 0.0) || !std::isfinite(chi2)) fail(ErrorKind::parameter, "chi2 must be finite and nonnegative");
  if (samples < 2) fail(ErrorKind::parameter, "need at least two samples");
  for (const auto& p : plan.pairs) {
    if (p.hi >= n || p.lo >= p.hi) fail(ErrorKind::parameter, "plan pair outside [n] or not normalised");
  }
  MonteCarloEstimate out;
  out.samples = samples;
  if (chi2 == 0.0 || plan.pairs.empty()) return out;

  std::unordered_set<std::uint64_t> queried;
  queried.reserve(plan.pairs.size() * 2);
  for (const auto& p : plan.pairs) queried.insert(p.key());
  const double base = 1.0 + chi2;

  // Chunked Welford accumulators, merged in chunk order.
  struct Moments {
    double count = 0.0, mean = 0.0, m2 = 0.0;
    void add(double x) {
      count += 1.0;
      const double d = x - mean;
      mean += d / count;
      m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
      if (o.count == 0.0) return;
      const double total = count + o.count;
      const double d = o.mean - mean;
      mean += d * o.count / total;
      m2 += o.m2 + d * d * count * o.count / total;
      count = total;
    }
  };
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Moments> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<Vertex> common;
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(samples, begin + kChunk);
    for (std::uint64_t s = begin; s < end; ++s) {
      Rng rng(derive_seed(seed, {stream::overlap, s}));
      const auto first = sample_k_subset(n, k, rng);
      const auto second = sample_k_subset(n, k, rng);
      common.clear();
      std::set_intersection(first.begin(), first.end(), second.begin(), second.end(),
                            std::back_inserter(common));
      std::uint64_t count = 0;
      for (std::size_t a = 0; a < common.size(); ++a)
        for (std::size_t b = a + 1; b < common.size(); ++b)
          count += queried.contains(VertexPair{common[a], common[b]}.key()) ? 1 : 0;
      partial[c].add(std::pow(base, static_cast<double>(count)) - 1.0);
    }
  });
  Moments total;
  for (const auto& m : partial) total.merge(m);
  out.estimate = total.mean;
  out.standard_error = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  return out;
}

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::impossible: return "impossible";
    case Phase::conjecturally_hard: return "conjecturally_hard";
    case Phase::hard: return "hard";
    case Phase::easy: return "easy";
  }
  return "impossible";
}

Phase classify_phase(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorKind::domain, "alpha must lie in (0, 2)");
  if (!(beta > 0.0 && beta < 1.0)) fail(ErrorKind::domain, "beta must lie in (0, 1)");
  if (alpha <= 2.0 - 2.0 * beta) return Phase::impossible;
  if (beta < 0.5) return Phase::hard;
  if (beta > 0.5 && alpha > 3.0 - 3.0 * beta) return Phase::easy;
  if (alpha <= 3.0 - 3.0 * beta) return Phase::conjecturally_hard;
  // beta == 1/2 above alpha = 3/2: the hard/easy boundary.
  return Phase::hard;
}

}  // namespace pdsq
