#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pdsq/detectors.hpp"
#include "pdsq/model.hpp"
#include "pdsq/oracle.hpp"

namespace pdsq {

/// Baseline detector that ignores the data.
struct ConstantDetector {
  int decision = 0;
};
/// Baseline detector that flips a fair coin per trial.
struct CoinDetector {};

using DetectorSpec = std::variant<ScanConfig, DegreeConfig, ConstantDetector, CoinDetector>;

/// The detector issues its own query pattern (required for scan and degree).
struct PatternStrategy {};
/// Q uniform pairs without replacement, issued before the detector runs.
struct UniformStrategy {};
/// GreedyAdaptiveRule with the model's noise mean as baseline rate.
struct GreedyStrategy {
  std::uint32_t fanout = 8;
};

using StrategySpec = std::variant<PatternStrategy, UniformStrategy, GreedyStrategy>;

std::string_view detector_name(const DetectorSpec& d) noexcept;
std::string_view strategy_name(const StrategySpec& s) noexcept;

struct TrialConfig {
  ModelParams params;
  DetectorSpec detector = ConstantDetector{};
  StrategySpec strategy = PatternStrategy{};
  std::optional<std::uint64_t> budget;  // Q; unset means the detector's implied budget
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  BudgetMode budget_mode = BudgetMode::unique_pairs;
  unsigned threads = 0;  // 0: hardware concurrency; never affects results

  /// Unique pairs the detector's own pattern needs (0 for baselines).
  std::uint64_t implied_budget() const;
  std::uint64_t effective_budget() const { return budget.value_or(implied_budget()); }

  /// Throws parameter / infeasible_config errors.
  void validate() const;
};

/// Canonical JSON echo of a configuration (threads excluded: it never changes results).
std::string to_json(const TrialConfig& cfg);
/// Stable 64-bit key of the canonical echo, as 16 hex digits.
std::string config_key(const TrialConfig& cfg);

struct TrialSeeds {
  std::uint64_t instance = 0;
  std::uint64_t strategy = 0;  // shared by the H0 and H1 trial with the same index
  std::uint64_t decision = 0;
};

TrialSeeds trial_seeds(std::uint64_t master_seed, Hypothesis h, std::uint64_t index) noexcept;

struct TrialOutcome {
  DetectorVerdict verdict;
  std::optional<std::uint64_t> planted_hits;  // H1 only
  std::uint64_t queries = 0;                  // budget consumed
  std::uint64_t instance_seed = 0;
};

/// Builds the instance and oracle for (hypothesis, index), runs the strategy
/// and detector. Errors are rethrown with the trial identity prepended.
TrialOutcome run_trial(const TrialConfig& cfg, Hypothesis h, std::uint64_t index);

struct PlantedHitStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t max = 0;
};

struct RiskEstimate {
  double type1_rate = 0.0;
  double type2_rate = 0.0;
  double risk = 0.0;  // type1_rate + type2_rate
  double half_width_type1 = 0.0;
  double half_width_type2 = 0.0;
  std::uint64_t trials = 0;
  bool ci_valid = false;  // normal approximation is only trusted for trials >= 30
  PlantedHitStats planted_hits;
  TrialConfig config;
};

/// 95% normal-approximation half-width, floored at 1/(2 trials).
double half_width_95(double rate, std::uint64_t trials);

RiskEstimate estimate_risk(const TrialConfig& cfg);

std::string to_json(const RiskEstimate& est);

struct SweepRecord {
  std::uint64_t index = 0;
  std::string key;
  TrialConfig config;
  std::optional<RiskEstimate> estimate;
  std::string error;  // set when the config failed
};

class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual void write(const SweepRecord& record) = 0;
};

/// Column list of the sweep CSV, in order.
std::span<const std::string_view> sweep_csv_columns();
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& record);
std::string sweep_json_line(const SweepRecord& record);

/// Writes one CSV row per record; each write is a single locked append.
class CsvRecordSink final : public RecordSink {
 public:
  CsvRecordSink(std::ostream& os, bool write_header);
  void write(const SweepRecord& record) override;

 private:
  std::ostream& os_;
  std::mutex mutex_;
};

class JsonLinesRecordSink final : public RecordSink {
 public:
  explicit JsonLinesRecordSink(std::ostream& os) : os_(os) {}
  void write(const SweepRecord& record) override;

 private:
  std::ostream& os_;
  std::mutex mutex_;
};

struct SweepOptions {
  /// Completed-config manifest; read on start, rewritten after every record.
  std::optional<std::filesystem::path> manifest;
  /// Stop after this many newly computed records (simulates an interruption).
  std::optional<std::uint64_t> stop_after;
  std::function<void(const SweepRecord&, std::uint64_t done, std::uint64_t total)> progress;
};

/// Evaluates the grid in order and streams one record per config to every
/// sink. Per-config failures land in record.error; the sweep carries on.
/// Returns the newly computed records.
std::vector<SweepRecord> sweep(std::span<const TrialConfig> grid, std::span<RecordSink* const> sinks,
                               const SweepOptions& options = {});

/// Indices and keys recorded in a manifest file (empty if the file is absent).
std::vector<std::pair<std::uint64_t, std::string>> read_manifest(const std::filesystem::path& path);

}  // namespace pdsq
