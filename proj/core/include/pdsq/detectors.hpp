#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "pdsq/divergences.hpp"
#include "pdsq/model.hpp"
#include "pdsq/oracle.hpp"
#include "pdsq/scan_search.hpp"

namespace pdsq {

enum class ThresholdMode { chernoff_gamma, bernstein_midpoint };
enum class SearchMode { automatic, exact, local_search };

std::string_view to_string(ThresholdMode m) noexcept;
std::string_view to_string(SearchMode m) noexcept;
ThresholdMode parse_threshold_mode(std::string_view text);
SearchMode parse_search_mode(std::string_view text);

inline constexpr double kDefaultEnumerationCap = 5e6;
inline constexpr std::uint32_t kDefaultRestarts = 50;

struct ScanConfig {
  std::uint32_t M = 2;
  double epsilon = 0.2;
  std::optional<double> gamma;  // unset: default level, see derive_scan
  ThresholdMode threshold_mode = ThresholdMode::chernoff_gamma;
  SearchMode search_mode = SearchMode::automatic;
  double enumeration_cap = kDefaultEnumerationCap;
  std::uint32_t restarts = kDefaultRestarts;
};

/// Quantities the scan test derives from (params, config).
struct ScanPlanInfo {
  std::uint32_t N0 = 0;   // floor((1 - eps) k M / n)
  double gamma = 0.0;     // level used in chernoff_gamma mode
  double threshold = 0.0; // tau_scan
  std::uint64_t budget = 0;  // C(M, 2)
  bool exact = true;      // whether the search will enumerate
};

/// Default gamma: p - (p - q)/10; when p = 1 it is 1 - 1/(2 C(N0, 2)) so
/// that a complete N0-subgraph still clears the strict comparison.
ScanPlanInfo derive_scan(const ModelParams& params, const ScanConfig& cfg);

struct DegreeConfig {
  std::uint32_t n_prime = 2;
  std::uint32_t M = 1;
  double epsilon = 0.1;
  LogBase log_base = LogBase::natural;
};

struct DegreePlanInfo {
  std::uint32_t N0 = 0;              // floor((1 - eps) k n' / n)
  double tau_deg = 0.0;              // n' q + N0 (p - q) / 2
  double verdict_threshold = 0.0;    // 2 log n'
  std::uint64_t unique_pairs = 0;    // M n' - M - C(M, 2)
  std::uint64_t nominal_budget = 0;  // M n'
};

DegreePlanInfo derive_degree(const ModelParams& params, const DegreeConfig& cfg);

struct DetectorVerdict {
  double statistic = 0.0;
  double threshold = 0.0;
  int decision = 0;  // 1 iff statistic > threshold
  std::string mode;
  bool approximate = false;

  friend bool operator==(const DetectorVerdict&, const DetectorVerdict&) = default;
};

inline DetectorVerdict make_verdict(double statistic, double threshold, std::string mode,
                                    bool approximate = false) {
  return {statistic, threshold, statistic > threshold ? 1 : 0, std::move(mode), approximate};
}

std::string to_json(const DetectorVerdict& v);

/// Scan statistic over an observed sample: max over N0-subsets of the summed entries.
SubsetSearchResult scan_statistic(const SymmetricMatrix& observed, std::uint32_t N0, bool exact,
                                  std::uint32_t restarts, std::uint64_t seed);

/// Queries all pairs in a uniform M-subset and thresholds the densest
/// N0-subset. Throws infeasible_config if N0 < 2 or the remaining budget is
/// below C(M, 2).
DetectorVerdict scan_test(QueryOracle& oracle, const ModelParams& params, const ScanConfig& cfg,
                          std::uint64_t seed);

/// Number of probes whose summed answers against the panel exceed tau.
/// pairs[i] was answered with answers[i]; every pair must touch a probe.
std::uint32_t count_heavy_probes(std::span<const Vertex> probes, std::span<const VertexPair> pairs,
                                 std::span<const double> answers, double tau);

/// Queries the probe-by-panel pattern and counts heavy probes. Throws
/// infeasible_config if N0 < 1 or the remaining budget is below the unique-pair count.
DetectorVerdict degree_test(QueryOracle& oracle, const ModelParams& params, const DegreeConfig& cfg,
                            std::uint64_t seed);

}  // namespace pdsq
