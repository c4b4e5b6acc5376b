#pragma once

#include <iosfwd>

namespace leanreg::cli {

/// Parses arguments, runs the command and writes the JSON report to --out
/// (plus a .csv coverage table for simulate) or to `out`. Diagnostics go to
/// `err`. Returns the process exit status.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace leanreg::cli
