#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leanreg {

enum class ErrorCode {
  not_symmetric,
  not_positive_definite,
  no_convergence,
  dimension_mismatch,
  singular_design,
  degenerate_dof,
  zero_variance,
  bad_coordinate,
  integration_failure,
  missing_column,
  non_numeric_cell,
  empty_data,
  invalid_argument,
};

/// Stable snake_case identifier, used in structured error reports.
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can classify it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace leanreg
