#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idsd {

enum class ErrorCode {
  basis_mismatch,
  statistics_mismatch,
  unsupported_basis,
  degenerate_state,   // zero-norm two-particle state
  no_support,         // partial trace with vanishing raw trace
  pauli_violation,
  zero_eigenvalue,
  decomposition_failure,
  invalid_argument,
  parse_error,
  verification_failure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error carrying a stable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace idsd
