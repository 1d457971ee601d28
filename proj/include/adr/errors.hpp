#pragma once

#include <stdexcept>
#include <string>

namespace adr {

/// Error categories surfaced by the library. The names double as the
/// machine-readable codes emitted by the CLI.
enum class Errc {
  unsupported_forward,
  dimension_mismatch,
  singular_system,
  missing_lipschitz,
  infeasible_parameters,
  rate_not_applicable,
  requires_linear_b,
  invalid_constants,
  singular_sum,
  dimension_too_large,
  not_prox_family,
  invalid_problem,
  kappa_range,
  cq_violated,
  invalid_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unsupported_forward: return "UNSUPPORTED_FORWARD";
    case Errc::dimension_mismatch: return "DIMENSION_MISMATCH";
    case Errc::singular_system: return "SINGULAR_SYSTEM";
    case Errc::missing_lipschitz: return "MISSING_LIPSCHITZ";
    case Errc::infeasible_parameters: return "INFEASIBLE_PARAMETERS";
    case Errc::rate_not_applicable: return "RATE_NOT_APPLICABLE";
    case Errc::requires_linear_b: return "REQUIRES_LINEAR_B";
    case Errc::invalid_constants: return "INVALID_CONSTANTS";
    case Errc::singular_sum: return "SINGULAR_SUM";
    case Errc::dimension_too_large: return "DIMENSION_TOO_LARGE";
    case Errc::not_prox_family: return "NOT_PROX_FAMILY";
    case Errc::invalid_problem: return "INVALID_PROBLEM";
    case Errc::kappa_range: return "KAPPA_RANGE";
    case Errc::cq_violated: return "CQ_VIOLATED";
    case Errc::invalid_argument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace adr
