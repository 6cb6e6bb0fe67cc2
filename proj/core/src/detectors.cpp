#include "pdsq/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>
#include <unordered_map>

#include "pdsq/error.hpp"
#include "pdsq/random.hpp"
#include "pdsq/strategies.hpp"

namespace pdsq {

std::string_view to_string(ThresholdMode m) noexcept {
  return m == ThresholdMode::chernoff_gamma ? "chernoff_gamma" : "bernstein_midpoint";
}

std::string_view to_string(SearchMode m) noexcept {
  switch (m) {
    case SearchMode::automatic: return "auto";
    case SearchMode::exact: return "exact";
    case SearchMode::local_search: return "local_search";
  }
  return "auto";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "chernoff_gamma" || text == "chernoff") return ThresholdMode::chernoff_gamma;
  if (text == "bernstein_midpoint" || text == "bernstein") return ThresholdMode::bernstein_midpoint;
  fail(ErrorKind::parameter, "unknown threshold mode '" + std::string(text) + "'");
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "auto" || text == "automatic") return SearchMode::automatic;
  if (text == "exact") return SearchMode::exact;
  if (text == "local_search" || text == "local") return SearchMode::local_search;
  fail(ErrorKind::parameter, "unknown search mode '" + std::string(text) + "'");
}

namespace {

// floor(x) that forgives representation error just below an integer.
std::uint32_t floor_count(double x) {
  return x <= 0.0 ? 0u : static_cast<std::uint32_t>(std::floor(x + 1e-9));
}

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::parameter, "epsilon must lie in (0, 1)");
}

}  // namespace

ScanPlanInfo derive_scan(const ModelParams& params, const ScanConfig& cfg) {
  params.validate();
  check_epsilon(cfg.epsilon);
  if (cfg.M < 2 || cfg.M > params.n) fail(ErrorKind::parameter, "scan needs 2 <= M <= n");
  ScanPlanInfo info;
  info.N0 = floor_count((1.0 - cfg.epsilon) * params.k * static_cast<double>(cfg.M) / params.n);
  if (info.N0 < 2) {
    fail(ErrorKind::infeasible_config,
         "scan subset size N0 = " + std::to_string(info.N0) + " is below 2; increase M or decrease epsilon");
  }
  const double p = params.planted_mean();
  const double q = params.noise_mean();
  const double pairs = static_cast<double>(binom2(info.N0));
  if (cfg.gamma) {
    if (!(*cfg.gamma >= q && *cfg.gamma <= p)) fail(ErrorKind::parameter, "gamma must lie in [q, p]");
    info.gamma = *cfg.gamma;
  } else if (params.dist.is_bernoulli() && p >= 1.0) {
    info.gamma = 1.0 - 1.0 / (2.0 * pairs);
  } else {
    info.gamma = p - (p - q) / 10.0;
  }
  info.threshold = cfg.threshold_mode == ThresholdMode::chernoff_gamma ? pairs * info.gamma
                                                                       : pairs * (p + q) / 2.0;
  info.budget = binom2(cfg.M);
  switch (cfg.search_mode) {
    case SearchMode::exact: info.exact = true; break;
    case SearchMode::local_search: info.exact = false; break;
    case SearchMode::automatic:
      info.exact = binomial_coefficient(cfg.M, info.N0) <= cfg.enumeration_cap;
      break;
  }
  return info;
}

DegreePlanInfo derive_degree(const ModelParams& params, const DegreeConfig& cfg) {
  params.validate();
  check_epsilon(cfg.epsilon);
  if (!(cfg.M >= 1 && cfg.M <= cfg.n_prime && cfg.n_prime <= params.n)) {
    fail(ErrorKind::parameter, "degree test needs 1 <= M <= n' <= n");
  }
  if (cfg.n_prime < 2) fail(ErrorKind::parameter, "degree test needs n' >= 2");
  DegreePlanInfo info;
  info.N0 = floor_count((1.0 - cfg.epsilon) * params.k * static_cast<double>(cfg.n_prime) / params.n);
  if (info.N0 < 1) {
    fail(ErrorKind::infeasible_config, "degree-test N0 is below 1; increase n' or decrease epsilon");
  }
  const double p = params.planted_mean();
  const double q = params.noise_mean();
  info.tau_deg = cfg.n_prime * q + info.N0 * (p - q) / 2.0;
  info.verdict_threshold = 2.0 * log_in(static_cast<double>(cfg.n_prime), cfg.log_base);
  info.unique_pairs = bipartite_unique_pairs(cfg.n_prime, cfg.M);
  info.nominal_budget = static_cast<std::uint64_t>(cfg.M) * cfg.n_prime;
  return info;
}

std::string to_json(const DetectorVerdict& v) {
  nlohmann::json j;
  j["statistic"] = v.statistic;
  j["threshold"] = v.threshold;
  j["decision"] = v.decision;
  j["mode"] = v.mode;
  j["approximate_flag"] = v.approximate;
  return j.dump();
}

SubsetSearchResult scan_statistic(const SymmetricMatrix& observed, std::uint32_t N0, bool exact,
                                  std::uint32_t restarts, std::uint64_t seed) {
  return exact ? densest_subset_exact(observed, N0)
               : densest_subset_local_search(observed, N0, restarts, seed);
}

DetectorVerdict scan_test(QueryOracle& oracle, const ModelParams& params, const ScanConfig& cfg,
                          std::uint64_t seed) {
  const ScanPlanInfo info = derive_scan(params, cfg);
  if (oracle.remaining() < info.budget) {
    fail(ErrorKind::infeasible_config, "scan needs " + std::to_string(info.budget) +
                                           " queries but only " + std::to_string(oracle.remaining()) +
                                           " remain");
  }
  const CliquePattern pattern = clique_pattern_plan(params.n, cfg.M, derive_seed(seed, {stream::strategy}));
  SymmetricMatrix observed(cfg.M);
  // Sample positions are recovered from the sorted sample.
  std::unordered_map<Vertex, std::uint32_t> row;
  row.reserve(cfg.M);
  for (std::uint32_t a = 0; a < pattern.sample.size(); ++a) row.emplace(pattern.sample[a], a);
  for (const auto& pair : pattern.plan.pairs) {
    observed.set(row.at(pair.lo), row.at(pair.hi), oracle.query(pair.lo, pair.hi));
  }
  const auto result =
      scan_statistic(observed, info.N0, info.exact, cfg.restarts, derive_seed(seed, {stream::detector}));
  return make_verdict(result.value, info.threshold, info.exact ? "scan_exact" : "scan_local_search",
                      result.approximate);
}

std::uint32_t count_heavy_probes(std::span<const Vertex> probes, std::span<const VertexPair> pairs,
                                 std::span<const double> answers, double tau) {
  if (pairs.size() != answers.size()) fail(ErrorKind::parameter, "pairs and answers differ in length");
  std::unordered_map<Vertex, double> degree;
  degree.reserve(probes.size());
  for (Vertex v : probes) degree.emplace(v, 0.0);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    bool touched = false;
    if (auto it = degree.find(pairs[t].lo); it != degree.end()) {
      it->second += answers[t];
      touched = true;
    }
    if (auto it = degree.find(pairs[t].hi); it != degree.end()) {
      it->second += answers[t];
      touched = true;
    }
    if (!touched) fail(ErrorKind::parameter, "pair does not touch any probe");
  }
  std::uint32_t heavy = 0;
  for (const auto& [v, d] : degree) heavy += d > tau ? 1u : 0u;
  return heavy;
}

DetectorVerdict degree_test(QueryOracle& oracle, const ModelParams& params, const DegreeConfig& cfg,
                            std::uint64_t seed) {
  const DegreePlanInfo info = derive_degree(params, cfg);
  if (oracle.remaining() < info.unique_pairs) {
    fail(ErrorKind::infeasible_config, "degree test needs " + std::to_string(info.unique_pairs) +
                                           " queries but only " + std::to_string(oracle.remaining()) +
                                           " remain");
  }
  const BipartitePattern pattern =
      bipartite_pattern_plan(params.n, cfg.n_prime, cfg.M, derive_seed(seed, {stream::strategy}));
  const std::vector<double> answers = execute(pattern.plan, oracle);
  const std::uint32_t heavy = count_heavy_probes(pattern.probes, pattern.plan.pairs, answers, info.tau_deg);
  return make_verdict(static_cast<double>(heavy), info.verdict_threshold, "degree");
}

}  // namespace pdsq
