#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pdsq/divergences.hpp"
#include "pdsq/strategies.hpp"

namespace pdsq {

struct BoundInputs {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  BernPair pair;
  double epsilon = 0.0;   // slack in the (2 -/+ eps) prefactors; 0 gives the limit value
  double delta = 0.5;     // adaptive lower-bound risk slack
  double C = 8.0;         // constant of the chi-square form of the scan condition
  double epsilon0 = 0.1;  // slack in the minimum-k condition
  double degree_constant = 1.0;  // hidden constant of the degree-test budget
  LogBase base = LogBase::natural;
};

/// Query-complexity thresholds for detecting a planted dense subgraph.
/// All logarithms use inputs.base; chi^4 is base-free.
struct BoundReport {
  BoundInputs inputs;
  double chi2 = 0.0;
  double kl = 0.0;
  double statistical_lower_Q = 0.0;     // (2-eps) n^2/(k^2 chi^4) log^2(n/k)
  double adaptive_lower_Q = 0.0;        // delta * statistical_lower_Q
  double scan_sufficient_Q = 0.0;       // (2+eps) n^2/(k^2 KL^2) log^2(n/k)
  double scan_sufficient_Q_chi = 0.0;   // (2+eps) C n^2/(k^2 chi^4) log^2(n/k)
  double degree_sufficient_Q = 0.0;     // c n^3/k^3 log^3(n) / chi^2
  double min_k = 0.0;                   // (2+eps0) log(n) / KL
  /// statistical_lower_Q with log^2 n in place of log^2(n/k); present only
  /// when the two differ by more than 1%.
  std::optional<double> statistical_lower_Q_logn;
};

/// Throws domain on q outside (0, 1), q >= p, p > 1, eps outside [0, 2),
/// delta outside (0, 1], or k > n.
BoundReport theorem1_bounds(const BoundInputs& inputs);

std::string to_json(const BoundReport& report);

enum class AdaptivityMode { non_adaptive, adaptive };

/// High-probability (1 - delta) ceiling on the number of planted pairs a
/// mechanism with Q queries can hit.
///   non_adaptive: Q k^2/n^2 (1 + n / (sqrt(delta) k sqrt(Q)))
///   adaptive:     Q k^2/(delta n^2) sqrt(1 + n^2/(Q k^2)) sqrt(1 + chi2_prime)
double lemma1_planted_bound(double Q, double n, double k, double delta, AdaptivityMode mode,
                            double chi2_prime = 0.0);

/// exp(-k d_KL(h/k || k/n)) with natural-log KL: upper bound on P(H >= h)
/// for H the overlap of two independent uniform k-subsets of [n].
/// Throws domain when h/k < k/n or h > k.
double hypergeom_tail_upper(std::uint64_t n, std::uint64_t k, std::uint64_t h);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Monte Carlo estimate of E[(1 + chi2)^|W1 ∩ W2|] - 1 where W_i are the plan
/// pairs inside K_i x K_i for independent uniform k-subsets K_1, K_2.
/// Per-sample seeds derive from (seed, sample index), so the result does not
/// depend on `threads`.
MonteCarloEstimate chi_square_overlap_estimate(const QueryPlan& plan, std::uint32_t n, std::uint32_t k,
                                               double chi2, std::uint64_t samples, std::uint64_t seed,
                                               unsigned threads = 0);

enum class Phase { impossible, conjecturally_hard, hard, easy };

std::string_view to_string(Phase p) noexcept;

/// Region of the (beta, alpha) exponent plane, k = n^beta and Q = n^alpha.
/// Boundaries: alpha = 2 - 2 beta belongs to impossible; alpha = 3 - 3 beta
/// belongs to conjecturally_hard; beta = 1/2 goes to the harder neighbour.
/// Throws domain outside alpha in (0, 2), beta in (0, 1).
Phase classify_phase(double alpha, double beta);

}  // namespace pdsq
