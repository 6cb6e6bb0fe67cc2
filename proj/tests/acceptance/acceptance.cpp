// Acceptance checks, one per criterion. Prints "criterion N: PASS|FAIL ..."
// and exits non-zero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pdsq/bounds.hpp"
#include "pdsq/detectors.hpp"
#include "pdsq/divergences.hpp"
#include "pdsq/harness.hpp"
#include "pdsq/model.hpp"
#include "pdsq/oracle.hpp"
#include "pdsq/random.hpp"
#include "pdsq/strategies.hpp"
#include "reference.hpp"

using namespace pdsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome divergence_exactness() {
  bool ok = true;
  const double c = chi_square(BernPair{1.0, 0.5});
  const double d = kl(BernPair{1.0, 0.5}, LogBase::base2);
  ok = ok && std::abs(c - 1.0) <= 1e-12 && std::abs(d - 1.0) <= 1e-12;

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> unit(0.0, 1.0), mean(-2.0, 2.0), var(0.2, 4.0);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    // Bernoulli pairs, interior q so KL stays finite.
    const double p = unit(rng), q = 0.01 + 0.98 * unit(rng);
    const double cb = chi_square(BernPair{p, q}), kb = kl(BernPair{p, q});
    if (!(cb >= 0 && kb >= 0)) ++bad;
    if (std::abs(cb - ref::bernoulli_chi2_two_point(p, q)) > 1e-9 * std::max(1.0, cb)) ++bad;
    if (std::abs(kb - ref::bernoulli_kl_two_point(p, q)) > 1e-9 * std::max(1.0, kb)) ++bad;
    if (chi_square(BernPair{q, q}) != 0.0 || kl(BernPair{q, q}) != 0.0) ++bad;
    if (p != q && !(cb > 0 && kb > 0)) ++bad;

    const Gaussian a{mean(rng), var(rng)}, b{mean(rng), var(rng)};
    const double kg = kl(DistributionPair{a, b});
    if (!(kg > 0)) ++bad;
    if (kl(DistributionPair{a, a}) != 0.0 || chi_square(DistributionPair{a, a}) != 0.0) ++bad;
    if (a.variance < 2 * b.variance && !(chi_square(DistributionPair{a, b}) > 0)) ++bad;
  }
  ok = ok && bad == 0;
  return {ok, fmt("chi2=%.15g kl2=%.15g, %d identity violations over 1000 draws", c, d, bad)};
}

Outcome planted_count_concentration() {
  const std::uint32_t n = 100, k = 10;
  const std::uint64_t Q = 1000;
  const int trials = 10000;
  const auto params = ModelParams::bernoulli(n, k, 1.0, 0.5);
  const double bound = lemma1_planted_bound(double(Q), n, k, 0.1, AdaptivityMode::non_adaptive);
  double s = 0, s2 = 0;
  int above = 0;
  for (int t = 0; t < trials; ++t) {
    const auto inst = Instance::sample(params, Hypothesis::alternative, derive_seed(2001, {std::uint64_t(t)}));
    BudgetedOracle o(inst, Q, BudgetMode::unique_pairs, false);
    execute(uniform_plan(n, Q, derive_seed(2002, {std::uint64_t(t)})), o);
    const double c = double(instrumentation::planted_query_count(o));
    s += c;
    s2 += c * c;
    if (c > bound) ++above;
  }
  const double expect = double(Q) * k * (k - 1) / (double(n) * (n - 1));
  const double m = s / trials, se = std::sqrt((s2 - s * s / trials) / (trials - 1) / trials);
  const double frac = double(above) / trials;
  const bool ok = std::abs(m - expect) <= 3 * se && frac <= 0.12;
  return {ok, fmt("mean %.4f vs %.4f (SE %.4f), P(C > %.2f) = %.4f", m, expect, se, bound, frac)};
}

TrialConfig scan_config(std::uint32_t M) {
  TrialConfig cfg;
  cfg.params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  ScanConfig sc;
  sc.M = M;
  sc.epsilon = 0.2;
  sc.search_mode = SearchMode::exact;
  cfg.detector = sc;
  cfg.trials = 200;
  cfg.master_seed = 7;
  return cfg;
}

double half_width(const RiskEstimate& e) { return e.half_width_type1 + e.half_width_type2; }

Outcome scan_separation() {
  const auto big = estimate_risk(scan_config(20));
  const auto small = estimate_risk(scan_config(10));
  const bool ok = big.risk <= 0.2 && small.risk > big.risk + half_width(big) + half_width(small);
  return {ok, fmt("risk(M=20) = %.3f +/- %.3f, risk(M=10) = %.3f +/- %.3f", big.risk, half_width(big), small.risk,
                  half_width(small))};
}

Outcome degree_separation() {
  TrialConfig cfg;
  cfg.params = ModelParams::bernoulli(10000, 1000, 1.0, 0.5);
  DegreeConfig dc;
  dc.n_prime = 2000;
  dc.M = 400;
  dc.epsilon = 0.1;
  cfg.detector = dc;
  cfg.trials = 100;
  cfg.master_seed = 4;
  const auto e = estimate_risk(cfg);
  return {e.risk <= 0.1, fmt("risk %.3f (type1 %.3f, type2 %.3f)", e.risk, e.type1_rate, e.type2_rate)};
}

Outcome budget_monotonicity() {
  std::vector<TrialConfig> grid;
  for (std::uint32_t M : {10u, 14u, 17u, 20u}) grid.push_back(scan_config(M));
  std::vector<RecordSink*> sinks;
  const auto records = sweep(grid, sinks);
  bool ok = records.size() == grid.size();
  std::string detail;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].estimate) return {false, "config failed: " + records[i].error};
    const auto& e = *records[i].estimate;
    detail += fmt("%sM=%u: %.3f", i ? ", " : "", std::get<ScanConfig>(records[i].config.detector).M, e.risk);
    if (i > 0) {
      const auto& prev = *records[i - 1].estimate;
      if (e.risk > prev.risk + half_width(e) + half_width(prev)) ok = false;
    }
  }
  return {ok, detail};
}

Outcome overlap_threshold() {
  const std::uint32_t n = 2000, k = 40;
  const double chi2 = chi_square(BernPair{1.0, 0.5});
  const auto small = clique_pattern_plan(n, 30, 61).plan;
  const auto large = clique_pattern_plan(n, 500, 62).plan;
  const auto a = chi_square_overlap_estimate(small, n, k, chi2, 100000, 63);
  const auto b = chi_square_overlap_estimate(large, n, k, chi2, 100000, 64);
  const double exact_a = double(ref::clique_overlap_exact(n, k, 30, chi2));
  const double exact_b = double(ref::clique_overlap_exact(n, k, 500, chi2));
  const bool ok = a.estimate < 0.1 && b.estimate >= 1.0;
  return {ok, fmt("M=30: %.3g (SE %.2g, exact %.3g); M=500: %.3g (SE %.2g, exact %.3g)", a.estimate,
                  a.standard_error, exact_a, b.estimate, b.standard_error, exact_b)};
}

// Overlap of a fixed k-set with a uniform k-subset of [n], drawn by Floyd's method.
std::uint32_t overlap_sample(std::uint32_t n, std::uint32_t k, std::mt19937_64& rng, std::vector<char>& mark) {
  std::uint32_t hits = 0;
  std::vector<std::uint32_t> chosen;
  chosen.reserve(k);
  for (std::uint32_t j = n - k; j < n; ++j) {
    std::uint32_t t = std::uniform_int_distribution<std::uint32_t>(0, j)(rng);
    if (mark[t]) t = j;
    mark[t] = 1;
    chosen.push_back(t);
    if (t < k) ++hits;
  }
  for (auto c : chosen) mark[c] = 0;
  return hits;
}

Outcome tail_dominance() {
  const int samples = 1000000;
  int points = 0, bad = 0;
  double worst = INFINITY;
  for (std::uint32_t n : {50u, 100u, 500u}) {
    for (std::uint32_t k : {5u, 10u, 50u}) {
      if (k > n) continue;
      std::mt19937_64 rng(derive_seed(700, {n, k}));
      std::vector<char> mark(n, 0);
      std::vector<std::uint64_t> count(k + 1, 0);
      for (int s = 0; s < samples; ++s) ++count[overlap_sample(n, k, rng, mark)];
      const auto h0 = static_cast<std::uint32_t>(std::ceil(double(k) * k / n - 1e-12));
      for (std::uint32_t h = h0; h <= k; ++h) {
        std::uint64_t tail = 0;
        for (std::uint32_t x = h; x <= k; ++x) tail += count[x];
        const double emp = double(tail) / samples;
        const double se = std::sqrt(emp * (1 - emp) / samples);
        const double bound = hypergeom_tail_upper(n, k, h);
        ++points;
        if (bound < emp - 5 * se) ++bad;
        worst = std::min(worst, bound - (emp - 5 * se));
      }
    }
  }
  return {bad == 0, fmt("%d grid points, %d violations, min slack %.3g", points, bad, worst)};
}

class RecordingOracle final : public QueryOracle {
 public:
  explicit RecordingOracle(BudgetedOracle& inner) : inner_(inner) {}
  double query(Vertex i, Vertex j) override { return seen_[VertexPair::of(i, j).key()] = inner_.query(i, j); }
  std::uint32_t n() const override { return inner_.n(); }
  std::uint64_t budget() const override { return inner_.budget(); }
  std::uint64_t used() const override { return inner_.used(); }
  const std::map<std::uint64_t, double>& seen() const { return seen_; }

 private:
  BudgetedOracle& inner_;
  std::map<std::uint64_t, double> seen_;
};

Outcome oracle_equivalence() {
  // 0/1 answers keep every subset sum exact, so equality is bitwise.
  int scan_bad = 0, perm_bad = 0;
  std::uint64_t draw = 0;
  for (int rep = 0; rep < 100;) {
    Rng rng(derive_seed(800, {draw++}));
    const std::uint32_t n = 12 + rng() % 60, M = 4 + rng() % 9;
    const std::uint32_t k = std::max<std::uint32_t>(2, rng() % (n + 1));
    const double eps = 0.05 + 0.5 * std::uniform_real_distribution<double>()(rng);
    const auto N0 = static_cast<std::uint32_t>(std::floor((1 - eps) * k * M / double(n) + 1e-9));
    if (N0 < 2) continue;
    const auto params = ModelParams::bernoulli(n, k, 0.9, 0.4);
    const auto inst = Instance::sample(params, rep % 2 ? Hypothesis::alternative : Hypothesis::null, rng());
    ScanConfig cfg;
    cfg.M = M;
    cfg.epsilon = eps;
    cfg.search_mode = SearchMode::exact;
    BudgetedOracle inner(inst, binom2(M));
    RecordingOracle rec(inner);
    const auto v = scan_test(rec, params, cfg, rng());
    std::vector<Vertex> touched;
    for (const auto& [key, a] : rec.seen()) {
      touched.push_back(Vertex(key >> 32));
      touched.push_back(Vertex(key & 0xffffffffu));
    }
    std::ranges::sort(touched);
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    if (touched.size() != M) {
      ++scan_bad;
    } else {
      std::vector<std::vector<double>> w(M, std::vector<double>(M, 0.0));
      for (std::uint32_t a = 0; a < M; ++a) {
        for (std::uint32_t b = a + 1; b < M; ++b) {
          w[a][b] = w[b][a] = rec.seen().at(VertexPair::of(touched[a], touched[b]).key());
        }
      }
      if (v.statistic != ref::brute_force_densest(w, int(N0))) ++scan_bad;
    }
    ++rep;
  }
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(801, {rep}));
    const std::uint32_t n = 20 + rng() % 200;
    const bool gaussian = rep % 2;
    const std::uint32_t k = 2 + rng() % (n - 1);
    const auto params = gaussian ? ModelParams{n, k, {Gaussian{1.0, 1.0}, Gaussian{0.0, 1.0}}}
                                 : ModelParams::bernoulli(n, k, 0.8, 0.3);
    const auto inst = Instance::sample(params, rep % 3 ? Hypothesis::alternative : Hypothesis::null, rng());
    auto plan = uniform_plan(n, std::min<std::uint64_t>(300, binom2(n)), rng());
    BudgetedOracle first(inst, plan.size()), second(inst, plan.size());
    std::map<std::uint64_t, double> a, b;
    for (const auto& p : plan.pairs) a[p.key()] = first.query(p.lo, p.hi);
    std::shuffle(plan.pairs.begin(), plan.pairs.end(), rng);
    for (const auto& p : plan.pairs) b[p.key()] = rng() % 2 ? second.query(p.hi, p.lo) : second.query(p.lo, p.hi);
    if (a != b) ++perm_bad;
  }
  return {scan_bad == 0 && perm_bad == 0,
          fmt("scan vs brute force: %d mismatches / 100; permutation replays: %d mismatches / 100", scan_bad, perm_bad)};
}

// Region predicates written out independently of the classifier.
int region_hits(double a, double b) {
  const bool impossible = a <= 2 - 2 * b;
  const bool hard = !impossible && (b < 0.5 || (b == 0.5 && a > 1.5));
  const bool conj = !impossible && b >= 0.5 && a <= 3 - 3 * b;
  const bool easy = !impossible && b > 0.5 && a > 3 - 3 * b;
  return impossible + hard + conj + easy;
}

Phase region_of(double a, double b) {
  if (a <= 2 - 2 * b) return Phase::impossible;
  if (b < 0.5 || (b == 0.5 && a > 1.5)) return Phase::hard;
  if (a <= 3 - 3 * b) return Phase::conjecturally_hard;
  return Phase::easy;
}

Outcome phase_diagram() {
  const bool examples = classify_phase(1.8, 0.6) == Phase::easy && classify_phase(0.5, 0.6) == Phase::impossible &&
            classify_phase(1.0, 0.6) == Phase::conjecturally_hard && classify_phase(1.5, 0.4) == Phase::hard;
  int mismatches = 0, multi = 0;
  std::map<Phase, int> seen;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      const double b = (i + 0.5) / 200.0, a = 2.0 * (j + 0.5) / 200.0;
      if (region_hits(a, b) != 1) ++multi;
      const Phase got = classify_phase(a, b);
      ++seen[got];
      if (got != region_of(a, b)) ++mismatches;
    }
  }
  // Labels must flip when crossing each boundary line.
  int flips = 0, crossings = 0;
  const double h = 1e-6;
  for (int i = 1; i < 100; ++i) {
    const double b = i / 100.0;
    const double a1 = 2 - 2 * b;
    if (a1 - h > 0 && a1 + h < 2) {
      ++crossings;
      flips += classify_phase(a1 - h, b) == Phase::impossible && classify_phase(a1 + h, b) != Phase::impossible;
    }
    const double a2 = 3 - 3 * b;
    if (b > 0.5 + h && a2 - h > 0 && a2 + h < 2) {
      ++crossings;
      flips += classify_phase(a2 - h, b) == Phase::conjecturally_hard && classify_phase(a2 + h, b) == Phase::easy;
    }
  }
  for (int j = 1; j < 100; ++j) {
    const double a = 2.0 * j / 100.0;
    if (a <= 1.0 + 2 * h) continue;  // below alpha = 1 both sides are impossible
    ++crossings;
    const Phase lo = classify_phase(a, 0.5 - h), hi = classify_phase(a, 0.5 + h);
    flips += lo == Phase::hard && hi != Phase::hard;
  }
  const bool ok = examples && mismatches == 0 && multi == 0 && seen.size() == 4 && flips == crossings;
  return {ok, fmt("examples %s, grid mismatches %d, multiply-labelled %d, labels used %zu, boundary flips %d/%d",
                  examples ? "match" : "differ", mismatches, multi, seen.size(), flips, crossings)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::map<int, std::function<Outcome()>> checks{
      {1, divergence_exactness}, {2, planted_count_concentration}, {3, scan_separation},
      {4, degree_separation},    {5, budget_monotonicity},         {6, overlap_threshold},
      {7, tail_dominance},       {8, oracle_equivalence},          {9, phase_diagram},
  };
  int failed = 0;
  for (int c : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = checks.at(c)();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%s; %.1f s)\n", c, out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed ? 1 : 0;
}
