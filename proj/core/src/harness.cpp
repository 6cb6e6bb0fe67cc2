#include "pdsq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pdsq/error.hpp"
#include "pdsq/parallel.hpp"
#include "pdsq/random.hpp"
#include "pdsq/strategies.hpp"
#include "records_json.hpp"

namespace pdsq {

std::string_view detector_name(const DetectorSpec& d) noexcept {
  switch (d.index()) {
    case 0: return "scan";
    case 1: return "degree";
    case 2: return "constant";
    default: return "coin";
  }
}

std::string_view strategy_name(const StrategySpec& s) noexcept {
  switch (s.index()) {
    case 0: return "pattern";
    case 1: return "uniform";
    default: return "greedy";
  }
}

std::uint64_t TrialConfig::implied_budget() const {
  if (const auto* s = std::get_if<ScanConfig>(&detector)) return binom2(s->M);
  if (const auto* d = std::get_if<DegreeConfig>(&detector)) return bipartite_unique_pairs(d->n_prime, d->M);
  return 0;
}

void TrialConfig::validate() const {
  params.validate();
  if (trials < 1) fail(ErrorKind::parameter, "trials must be at least 1");
  const bool own_pattern = std::holds_alternative<ScanConfig>(detector) ||
                           std::holds_alternative<DegreeConfig>(detector);
  if (own_pattern && !std::holds_alternative<PatternStrategy>(strategy)) {
    fail(ErrorKind::parameter, "scan and degree detectors issue their own pattern; use the pattern strategy");
  }
  if (const auto* s = std::get_if<ScanConfig>(&detector)) (void)derive_scan(params, *s);
  if (const auto* d = std::get_if<DegreeConfig>(&detector)) (void)derive_degree(params, *d);
  if (const auto* c = std::get_if<ConstantDetector>(&detector)) {
    if (c->decision != 0 && c->decision != 1) fail(ErrorKind::parameter, "constant decision must be 0 or 1");
  }
  if (!std::holds_alternative<PatternStrategy>(strategy)) {
    if (!budget) fail(ErrorKind::parameter, "uniform and greedy strategies need an explicit budget Q");
    if (*budget > binom2(params.n)) fail(ErrorKind::budget_too_large, "budget exceeds C(n, 2)");
  }
  if (const auto* g = std::get_if<GreedyStrategy>(&strategy)) {
    if (g->fanout == 0 || (budget && *budget < g->fanout)) {
      fail(ErrorKind::parameter, "greedy strategy needs 1 <= fanout <= Q");
    }
  }
  if (budget && *budget < implied_budget()) {
    fail(ErrorKind::infeasible_config, "budget Q = " + std::to_string(*budget) +
                                           " is below the detector's pattern budget of " +
                                           std::to_string(implied_budget()));
  }
}

TrialSeeds trial_seeds(std::uint64_t master_seed, Hypothesis h, std::uint64_t index) noexcept {
  const auto tag = static_cast<std::uint64_t>(h);
  return {derive_seed(master_seed, {stream::instance, tag, index}),
          derive_seed(master_seed, {stream::strategy, index}),
          derive_seed(master_seed, {stream::decision, tag, index})};
}

namespace {

TrialOutcome run_trial_unchecked(const TrialConfig& cfg, Hypothesis h, std::uint64_t index) {
  const TrialSeeds seeds = trial_seeds(cfg.master_seed, h, index);
  const Instance instance = Instance::sample(cfg.params, h, seeds.instance);
  BudgetedOracle oracle(instance, cfg.effective_budget(), cfg.budget_mode, /*keep_log=*/false);

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformStrategy>) {
          execute(uniform_plan(cfg.params.n, *cfg.budget, seeds.strategy), oracle);
        } else if constexpr (std::is_same_v<T, GreedyStrategy>) {
          GreedyAdaptiveRule rule(cfg.params.n, *cfg.budget, s.fanout, cfg.params.noise_mean(), seeds.strategy);
          execute(rule, oracle);
        }
      },
      cfg.strategy);

  TrialOutcome out;
  out.instance_seed = seeds.instance;
  out.verdict = std::visit(
      [&](const auto& d) -> DetectorVerdict {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ScanConfig>) {
          return scan_test(oracle, cfg.params, d, seeds.strategy);
        } else if constexpr (std::is_same_v<T, DegreeConfig>) {
          return degree_test(oracle, cfg.params, d, seeds.strategy);
        } else if constexpr (std::is_same_v<T, ConstantDetector>) {
          return make_verdict(d.decision, 0.5, "constant");
        } else {
          Rng rng(seeds.decision);
          return make_verdict(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 0.5, "coin");
        }
      },
      cfg.detector);
  out.queries = oracle.used();
  if (h == Hypothesis::alternative) out.planted_hits = instrumentation::planted_query_count(oracle);
  return out;
}

}  // namespace

TrialOutcome run_trial(const TrialConfig& cfg, Hypothesis h, std::uint64_t index) {
  cfg.validate();
  try {
    return run_trial_unchecked(cfg, h, index);
  } catch (const Error& e) {
    throw Error(e.kind(), "trial " + std::string(to_string(h)) + "#" + std::to_string(index) + ": " + e.what());
  }
}

double half_width_95(double rate, std::uint64_t trials) {
  const double t = static_cast<double>(trials);
  return std::max(1.959963984540054 * std::sqrt(rate * (1.0 - rate) / t), 1.0 / (2.0 * t));
}

RiskEstimate estimate_risk(const TrialConfig& cfg) {
  cfg.validate();
  const std::uint64_t T = cfg.trials;
  std::vector<TrialOutcome> outcomes(2 * T);
  parallel_for(2 * T, cfg.threads, [&](std::size_t slot) {
    const Hypothesis h = slot < T ? Hypothesis::null : Hypothesis::alternative;
    const std::uint64_t index = slot < T ? slot : slot - T;
    try {
      outcomes[slot] = run_trial_unchecked(cfg, h, index);
    } catch (const Error& e) {
      throw Error(e.kind(), "trial " + std::string(to_string(h)) + "#" + std::to_string(index) + ": " + e.what());
    }
  });

  RiskEstimate est;
  est.config = cfg;
  est.trials = T;
  est.ci_valid = T >= 30;
  std::uint64_t false_alarms = 0, misses = 0;
  double hit_sum = 0.0, hit_sq = 0.0;
  for (std::uint64_t i = 0; i < T; ++i) {
    false_alarms += outcomes[i].verdict.decision == 1 ? 1 : 0;
    const auto& alt = outcomes[T + i];
    misses += alt.verdict.decision == 0 ? 1 : 0;
    const auto hits = alt.planted_hits.value_or(0);
    hit_sum += static_cast<double>(hits);
    hit_sq += static_cast<double>(hits) * static_cast<double>(hits);
    est.planted_hits.max = std::max(est.planted_hits.max, hits);
  }
  const double t = static_cast<double>(T);
  est.type1_rate = static_cast<double>(false_alarms) / t;
  est.type2_rate = static_cast<double>(misses) / t;
  est.risk = est.type1_rate + est.type2_rate;
  est.half_width_type1 = half_width_95(est.type1_rate, T);
  est.half_width_type2 = half_width_95(est.type2_rate, T);
  est.planted_hits.mean = hit_sum / t;
  est.planted_hits.stddev =
      T > 1 ? std::sqrt(std::max(0.0, (hit_sq - hit_sum * hit_sum / t) / (t - 1.0))) : 0.0;
  return est;
}

std::vector<SweepRecord> sweep(std::span<const TrialConfig> grid, std::span<RecordSink* const> sinks,
                               const SweepOptions& options) {
  if (grid.empty()) fail(ErrorKind::parameter, "sweep grid is empty");
  std::vector<std::pair<std::uint64_t, std::string>> done;
  if (options.manifest) done = read_manifest(*options.manifest);
  std::set<std::pair<std::uint64_t, std::string>> skip(done.begin(), done.end());

  std::vector<SweepRecord> produced;
  std::uint64_t computed = 0;
  for (std::uint64_t i = 0; i < grid.size(); ++i) {
    SweepRecord record;
    record.index = i;
    record.config = grid[i];
    record.key = config_key(grid[i]);
    if (skip.contains({i, record.key})) continue;
    if (options.stop_after && computed >= *options.stop_after) break;
    try {
      record.estimate = estimate_risk(grid[i]);
    } catch (const Error& e) {
      record.error = std::string(to_string(e.kind())) + ": " + e.what();
    } catch (const std::exception& e) {
      record.error = e.what();
    }
    for (RecordSink* sink : sinks) sink->write(record);
    ++computed;
    if (options.manifest) {
      done.emplace_back(i, record.key);
      detail::write_manifest(*options.manifest, done);
    }
    if (options.progress) options.progress(record, i + 1, grid.size());
    produced.push_back(std::move(record));
  }
  return produced;
}

}  // namespace pdsq
