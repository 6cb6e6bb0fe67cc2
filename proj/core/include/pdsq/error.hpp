#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdsq {

enum class ErrorKind {
  domain,              // parameter outside the mathematical domain
  divergence_infinite, // divergence integral does not converge
  parameter,           // structurally invalid model/plan parameters
  self_loop,           // query or edge lookup with i == j
  budget_exhausted,    // new pair requested after the budget is spent
  budget_too_large,    // plan asks for more pairs than exist
  not_applicable,      // operation meaningless for this hypothesis
  infeasible_config,   // detector config cannot run under the given budget
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pdsq
