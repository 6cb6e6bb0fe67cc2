#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <map>

#include "pdsq/detectors.hpp"
#include "pdsq/error.hpp"
#include "pdsq/random.hpp"
#include "pdsq/strategies.hpp"
#include "reference.hpp"

using namespace pdsq;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;
}

// Answers every pair with the same value.
class ConstantOracle final : public QueryOracle {
 public:
  ConstantOracle(std::uint32_t n, std::uint64_t budget, double value) : n_(n), budget_(budget), value_(value) {}
  double query(Vertex, Vertex) override {
    ++used_;
    return value_;
  }
  std::uint32_t n() const override { return n_; }
  std::uint64_t budget() const override { return budget_; }
  std::uint64_t used() const override { return used_; }

 private:
  std::uint32_t n_;
  std::uint64_t budget_;
  double value_;
  std::uint64_t used_ = 0;
};

// Forwards to a BudgetedOracle and remembers every answer it relayed.
class RecordingOracle final : public QueryOracle {
 public:
  explicit RecordingOracle(BudgetedOracle& inner) : inner_(inner) {}
  double query(Vertex i, Vertex j) override {
    const double a = inner_.query(i, j);
    seen_[VertexPair::of(i, j).key()] = a;
    return a;
  }
  std::uint32_t n() const override { return inner_.n(); }
  std::uint64_t budget() const override { return inner_.budget(); }
  std::uint64_t used() const override { return inner_.used(); }
  const std::map<std::uint64_t, double>& seen() const { return seen_; }

 private:
  BudgetedOracle& inner_;
  std::map<std::uint64_t, double> seen_;
};

// Same answers as the real oracle but also carries the hidden planted set.
class LeakingOracle final : public QueryOracle {
 public:
  LeakingOracle(const Instance& inst, std::uint64_t budget) : inner_(inst, budget), planted_(inst.planted_set()) {}
  double query(Vertex i, Vertex j) override { return inner_.query(i, j); }
  std::uint32_t n() const override { return inner_.n(); }
  std::uint64_t budget() const override { return inner_.budget(); }
  std::uint64_t used() const override { return inner_.used(); }
  std::span<const Vertex> planted() const { return planted_; }

 private:
  BudgetedOracle inner_;
  std::span<const Vertex> planted_;
};

}  // namespace

TEST(DeriveScan, CalibrationConfig) {
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  ScanConfig cfg;
  cfg.M = 20;
  cfg.epsilon = 0.2;
  const auto info = derive_scan(params, cfg);
  EXPECT_EQ(info.N0, 8u);
  EXPECT_DOUBLE_EQ(info.gamma, 1.0 - 1.0 / 56.0);
  EXPECT_DOUBLE_EQ(info.threshold, 27.5);
  EXPECT_EQ(info.budget, 190u);
  EXPECT_TRUE(info.exact);
  cfg.threshold_mode = ThresholdMode::bernstein_midpoint;
  EXPECT_DOUBLE_EQ(derive_scan(params, cfg).threshold, 21.0);
}

TEST(DeriveScan, DefaultGammaBelowOne) {
  ScanConfig cfg;
  cfg.M = 40;
  const auto info = derive_scan(ModelParams::bernoulli(100, 50, 0.8, 0.3), cfg);
  EXPECT_DOUBLE_EQ(info.gamma, 0.75);
  EXPECT_EQ(info.N0, 16u);
  EXPECT_FALSE(info.exact);  // C(40,16) is far above the cap
}

TEST(DeriveScan, Errors) {
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  ScanConfig small;
  small.M = 4;
  EXPECT_EQ(kind_of([&] { derive_scan(params, small); }), ErrorKind::infeasible_config);
  ScanConfig g;
  g.M = 20;
  g.gamma = 0.4;
  EXPECT_EQ(kind_of([&] { derive_scan(params, g); }), ErrorKind::parameter);
  ScanConfig big;
  big.M = 101;
  EXPECT_EQ(kind_of([&] { derive_scan(params, big); }), ErrorKind::parameter);
}

TEST(ScanTest, AllZeroAnswers) {
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  ScanConfig cfg;
  cfg.M = 20;
  ConstantOracle o(100, 190, 0.0);
  const auto v = scan_test(o, params, cfg, 3);
  EXPECT_EQ(v.statistic, 0.0);
  EXPECT_EQ(v.decision, 0);
  EXPECT_EQ(o.used(), 190u);
}

TEST(ScanTest, CompletePlantedSample) {
  // k = n, so every sampled vertex is planted and the sample is a clique.
  const auto params = ModelParams::bernoulli(30, 30, 1.0, 0.5);
  const auto inst = Instance::sample(params, Hypothesis::alternative, 4);
  ScanConfig cfg;
  cfg.M = 10;
  cfg.epsilon = 0.5;
  cfg.search_mode = SearchMode::exact;
  {
    BudgetedOracle o(inst, 45);
    const auto v = scan_test(o, params, cfg, 1);
    EXPECT_EQ(v.statistic, double(binom2(5)));
    EXPECT_EQ(v.decision, 1);
    EXPECT_EQ(v.mode, "scan_exact");
  }
  cfg.gamma = 1.0;  // strict comparison at the boundary
  BudgetedOracle o(inst, 45);
  const auto v = scan_test(o, params, cfg, 1);
  EXPECT_EQ(v.statistic, v.threshold);
  EXPECT_EQ(v.decision, 0);
}

TEST(ScanTest, BudgetTooSmall) {
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  const auto inst = Instance::sample(params, Hypothesis::null, 4);
  ScanConfig cfg;
  cfg.M = 20;
  BudgetedOracle o(inst, 189);
  EXPECT_EQ(kind_of([&] { scan_test(o, params, cfg, 1); }), ErrorKind::infeasible_config);
}

TEST(ScanTest, ExactMatchesBruteForce) {
  std::uint64_t draw = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(70, {draw++}));
    const std::uint32_t n = 12 + rng() % 60;
    const std::uint32_t M = 4 + rng() % 9;  // 4..12
    const std::uint32_t k = std::max<std::uint32_t>(2, rng() % (n + 1));
    const double eps = 0.05 + 0.5 * std::uniform_real_distribution<double>()(rng);
    const std::uint32_t N0 = static_cast<std::uint32_t>(std::floor((1 - eps) * k * M / double(n) + 1e-9));
    if (N0 < 2) {
      --rep;  // redraw; only feasible configs count
      continue;
    }
    const bool gaussian = rep % 3 == 0;
    const ModelParams params = gaussian ? ModelParams{n, k, {Gaussian{1.0, 1.0}, Gaussian{0.0, 1.0}}}
                                        : ModelParams::bernoulli(n, k, 0.9, 0.4);
    const auto inst = Instance::sample(params, rep % 2 ? Hypothesis::alternative : Hypothesis::null, rng());
    ScanConfig cfg;
    cfg.M = M;
    cfg.epsilon = eps;
    cfg.search_mode = SearchMode::exact;
    BudgetedOracle inner(inst, binom2(M));
    RecordingOracle rec(inner);
    const auto v = scan_test(rec, params, cfg, rng());

    // Rebuild the observed matrix from what the detector was told.
    std::vector<Vertex> touched;
    for (const auto& [key, a] : rec.seen()) {
      touched.push_back(Vertex(key >> 32));
      touched.push_back(Vertex(key & 0xffffffffu));
    }
    std::ranges::sort(touched);
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    ASSERT_EQ(touched.size(), M);
    std::vector<std::vector<double>> w(M, std::vector<double>(M, 0.0));
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = a + 1; b < M; ++b) {
        w[a][b] = w[b][a] = rec.seen().at(VertexPair::of(touched[a], touched[b]).key());
      }
    }
    const double best = ref::brute_force_densest(w, int(N0));
    ASSERT_NEAR(v.statistic, best, 1e-9 * std::max(1.0, std::abs(best))) << "replay " << rep;
  }
}

TEST(ScanSearch, LocalSearchNeverExceedsExact) {
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng rng(derive_seed(71, {rep}));
    const std::uint32_t M = 4 + rng() % 9;
    const std::uint32_t r = 2 + rng() % (M - 1);
    SymmetricMatrix w(M);
    std::normal_distribution<double> g;
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = a + 1; b < M; ++b) w.set(a, b, rep % 2 ? double(rng() % 2) : g(rng));
    }
    const auto exact = densest_subset_exact(w, r);
    const auto local = densest_subset_local_search(w, r, 5, rng());
    ASSERT_LE(local.value, exact.value + 1e-12);
    ASSERT_EQ(local.subset.size(), r);
    ASSERT_NEAR(subset_weight(w, local.subset), local.value, 1e-9);
    ASSERT_NEAR(subset_weight(w, exact.subset), exact.value, 1e-9);
  }
}

TEST(ScanSearch, AddingAnEdgeNeverLowersTheStatistic) {
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    Rng rng(derive_seed(72, {rep}));
    const std::uint32_t M = 6 + rng() % 7;
    const std::uint32_t r = 2 + rng() % (M - 2);
    SymmetricMatrix w(M);
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = a + 1; b < M; ++b) w.set(a, b, double(rng() % 2));
    }
    const double before = scan_statistic(w, r, true, 0, 0).value;
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = a + 1; b < M; ++b) {
        if (w.at(a, b) != 0.0) continue;
        SymmetricMatrix v = w;
        v.set(a, b, 1.0);
        ASSERT_GE(scan_statistic(v, r, true, 0, 0).value, before);
      }
    }
  }
}

TEST(ScanTest, LocalSearchFlaggedApproximate) {
  const auto params = ModelParams::bernoulli(100, 50, 1.0, 0.5);
  const auto inst = Instance::sample(params, Hypothesis::alternative, 2);
  ScanConfig cfg;
  cfg.M = 20;
  cfg.enumeration_cap = 10;
  BudgetedOracle o(inst, 190);
  const auto v = scan_test(o, params, cfg, 5);
  EXPECT_EQ(v.mode, "scan_local_search");
  EXPECT_TRUE(v.approximate);
}

TEST(DeriveDegree, CalibrationConfig) {
  const auto params = ModelParams::bernoulli(10000, 1000, 1.0, 0.5);
  DegreeConfig cfg{2000, 400, 0.1, LogBase::natural};
  const auto info = derive_degree(params, cfg);
  EXPECT_EQ(info.N0, 180u);
  EXPECT_DOUBLE_EQ(info.tau_deg, 1045.0);
  EXPECT_DOUBLE_EQ(info.verdict_threshold, 2 * std::log(2000.0));
  EXPECT_EQ(info.unique_pairs, 719800u);
  EXPECT_EQ(info.nominal_budget, 800000u);
  cfg.log_base = LogBase::base2;
  EXPECT_DOUBLE_EQ(derive_degree(params, cfg).verdict_threshold, 2 * std::log2(2000.0));
}

TEST(DeriveDegree, Errors) {
  const auto params = ModelParams::bernoulli(100, 10, 1.0, 0.5);
  EXPECT_EQ(kind_of([&] { derive_degree(params, DegreeConfig{50, 60, 0.1}); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { derive_degree(params, DegreeConfig{200, 6, 0.1}); }), ErrorKind::parameter);
  EXPECT_EQ(kind_of([&] { derive_degree(params, DegreeConfig{5, 2, 0.1}); }), ErrorKind::infeasible_config);
}

TEST(DegreeTest, AllZeroAnswers) {
  const auto params = ModelParams::bernoulli(1000, 100, 1.0, 0.5);
  const DegreeConfig cfg{200, 30, 0.1};
  ConstantOracle o(1000, bipartite_unique_pairs(200, 30), 0.0);
  const auto v = degree_test(o, params, cfg, 8);
  EXPECT_EQ(v.statistic, 0.0);
  EXPECT_EQ(v.decision, 0);
}

TEST(DegreeTest, NoiselessFullPlant) {
  const auto params = ModelParams::bernoulli(60, 60, 1.0, 0.0);
  const auto inst = Instance::sample(params, Hypothesis::alternative, 1);
  const DegreeConfig cfg{40, 10, 0.1};
  BudgetedOracle o(inst, bipartite_unique_pairs(40, 10));
  const auto v = degree_test(o, params, cfg, 6);
  EXPECT_EQ(v.statistic, 10.0);
  EXPECT_EQ(v.decision, 10 > 2 * std::log(40.0) ? 1 : 0);
}

TEST(DegreeTest, CountIgnoresQueryOrder) {
  const auto params = ModelParams::bernoulli(500, 100, 0.9, 0.4);
  const auto inst = Instance::sample(params, Hypothesis::alternative, 3);
  const auto pattern = bipartite_pattern_plan(500, 120, 25, 4);
  BudgetedOracle o(inst, pattern.plan.size());
  auto answers = execute(pattern.plan, o);
  auto pairs = pattern.plan.pairs;
  const auto tau = 120 * 0.4 + 10;
  const auto base = count_heavy_probes(pattern.probes, pairs, answers, tau);
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::size_t> perm(pairs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<VertexPair> p2;
    std::vector<double> a2;
    for (auto t : perm) {
      p2.push_back(pairs[t]);
      a2.push_back(answers[t]);
    }
    ASSERT_EQ(count_heavy_probes(pattern.probes, p2, a2, tau), base);
  }
}

TEST(Detectors, LeakingFacadeChangesNothing) {
  const auto params = ModelParams::bernoulli(200, 60, 0.9, 0.3);
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto inst = Instance::sample(params, Hypothesis::alternative, rep);
    ScanConfig sc;
    sc.M = 14;
    BudgetedOracle plain(inst, binom2(14));
    LeakingOracle leaky(inst, binom2(14));
    ASSERT_FALSE(leaky.planted().empty());
    EXPECT_EQ(scan_test(plain, params, sc, rep), scan_test(leaky, params, sc, rep));

    const DegreeConfig dc{100, 20, 0.1};
    BudgetedOracle plain2(inst, bipartite_unique_pairs(100, 20));
    LeakingOracle leaky2(inst, bipartite_unique_pairs(100, 20));
    EXPECT_EQ(degree_test(plain2, params, dc, rep), degree_test(leaky2, params, dc, rep));
  }
}

TEST(Verdict, StrictDecisionAndJson) {
  EXPECT_EQ(make_verdict(2.0, 2.0, "x").decision, 0);
  EXPECT_EQ(make_verdict(2.5, 2.0, "x").decision, 1);
  const auto j = nlohmann::json::parse(to_json(make_verdict(3.0, 2.0, "scan_exact")));
  EXPECT_EQ(j.at("decision"), 1);
  EXPECT_EQ(j.at("mode"), "scan_exact");
  EXPECT_EQ(j.at("approximate_flag"), false);
  EXPECT_EQ(j.at("statistic"), 3.0);
  EXPECT_EQ(j.at("threshold"), 2.0);
}
