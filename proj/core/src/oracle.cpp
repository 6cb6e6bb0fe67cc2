#include "pdsq/oracle.hpp"

#include <ostream>
#include <string>

#include "pdsq/error.hpp"
#include "records_json.hpp"

namespace pdsq {

BudgetedOracle::BudgetedOracle(const Instance& instance, std::uint64_t budget, BudgetMode mode,
                               bool keep_log)
    : instance_(instance), budget_(budget), mode_(mode), keep_log_(keep_log) {
  answers_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(budget, 1u << 22)));
}

double BudgetedOracle::query(Vertex i, Vertex j) {
  if (i == j) fail(ErrorKind::self_loop, "self-loop query (" + std::to_string(i) + ", " + std::to_string(i) + ")");
  const VertexPair pair = VertexPair::of(i, j);
  std::lock_guard lock(mutex_);
  auto it = answers_.find(pair.key());
  const bool fresh = it == answers_.end();
  const std::uint64_t charged = mode_ == BudgetMode::every_call ? calls_charged_ : answers_.size();
  if ((fresh || mode_ == BudgetMode::every_call) && charged >= budget_) {
    fail(ErrorKind::budget_exhausted, "query budget of " + std::to_string(budget_) + " exhausted at pair (" +
                                          std::to_string(pair.lo) + ", " + std::to_string(pair.hi) + ")");
  }
  double answer;
  if (fresh) {
    answer = instance_.edge_value(pair.lo, pair.hi);
    answers_.emplace(pair.key(), answer);
    if (instance_.is_planted(pair.lo) && instance_.is_planted(pair.hi)) ++planted_hits_;
  } else {
    answer = it->second;
  }
  ++calls_charged_;
  if (keep_log_) log_.push_back({pair, answer, answers_.size()});
  return answer;
}

std::uint64_t BudgetedOracle::used() const {
  std::lock_guard lock(mutex_);
  return mode_ == BudgetMode::every_call ? calls_charged_ : answers_.size();
}

std::uint64_t BudgetedOracle::unique_queries() const {
  std::lock_guard lock(mutex_);
  return answers_.size();
}

namespace instrumentation {
std::uint64_t planted_query_count(const BudgetedOracle& oracle) {
  if (oracle.instance_.hypothesis() != Hypothesis::alternative) {
    fail(ErrorKind::not_applicable, "planted query count is undefined under H0");
  }
  std::lock_guard lock(oracle.mutex_);
  return oracle.planted_hits_;
}
}  // namespace instrumentation

void write_log_csv(std::ostream& os, std::uint64_t trial_id, std::span<const QueryLogEntry> log) {
  std::uint64_t step = 0;
  for (const auto& e : log) {
    os << trial_id << ',' << step++ << ',' << e.pair.lo << ',' << e.pair.hi << ','
       << detail::format_real(e.answer) << ',' << e.cumulative_unique << '\n';
  }
}

}  // namespace pdsq
