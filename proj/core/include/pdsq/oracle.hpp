#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "pdsq/model.hpp"
#include "pdsq/types.hpp"

namespace pdsq {

/// What detectors and query strategies see: answers and budget, nothing else.
class QueryOracle {
 public:
  virtual ~QueryOracle() = default;

  virtual double query(Vertex i, Vertex j) = 0;
  virtual std::uint32_t n() const = 0;
  virtual std::uint64_t budget() const = 0;
  virtual std::uint64_t used() const = 0;

  std::uint64_t remaining() const { return budget() - used(); }
};

enum class BudgetMode {
  unique_pairs,  // repeated pairs are free (default)
  every_call,    // every call is charged; for sensitivity checks
};

struct QueryLogEntry {
  VertexPair pair;
  double answer = 0.0;
  std::uint64_t cumulative_unique = 0;
};

class BudgetedOracle;

namespace instrumentation {
/// Unique queried pairs with both endpoints planted. Throws not_applicable under H0.
std::uint64_t planted_query_count(const BudgetedOracle& oracle);
}  // namespace instrumentation

/// The only path from a strategy or detector to an Instance. Thread-safe:
/// the budget check and the log append happen under one lock.
class BudgetedOracle final : public QueryOracle {
 public:
  BudgetedOracle(const Instance& instance, std::uint64_t budget,
                 BudgetMode mode = BudgetMode::unique_pairs, bool keep_log = true);

  double query(Vertex i, Vertex j) override;
  std::uint32_t n() const override { return instance_.n(); }
  std::uint64_t budget() const override { return budget_; }
  std::uint64_t used() const override;

  std::uint64_t unique_queries() const;
  /// Call-ordered log, including repeats. Empty when keep_log is false.
  std::span<const QueryLogEntry> log() const { return log_; }

  BudgetMode mode() const noexcept { return mode_; }

 private:
  friend std::uint64_t instrumentation::planted_query_count(const BudgetedOracle&);

  const Instance& instance_;
  std::uint64_t budget_;
  BudgetMode mode_;
  bool keep_log_;
  mutable std::mutex mutex_;
  std::unordered_map<std::uint64_t, double> answers_;
  std::vector<QueryLogEntry> log_;
  std::uint64_t calls_charged_ = 0;
  std::uint64_t planted_hits_ = 0;
};

/// CSV rows: trial_id,step,i,j,answer,cumulative_unique (no header).
void write_log_csv(std::ostream& os, std::uint64_t trial_id, std::span<const QueryLogEntry> log);
inline constexpr const char* kQueryLogCsvHeader = "trial_id,step,i,j,answer,cumulative_unique";

}  // namespace pdsq
