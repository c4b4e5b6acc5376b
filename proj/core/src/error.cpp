#include "leanreg/error.hpp"

namespace leanreg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_symmetric: return "not_symmetric";
    case ErrorCode::not_positive_definite: return "not_positive_definite";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::degenerate_dof: return "degenerate_dof";
    case ErrorCode::zero_variance: return "zero_variance";
    case ErrorCode::bad_coordinate: return "bad_coordinate";
    case ErrorCode::integration_failure: return "integration_failure";
    case ErrorCode::missing_column: return "missing_column";
    case ErrorCode::non_numeric_cell: return "non_numeric_cell";
    case ErrorCode::empty_data: return "empty_data";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace leanreg
